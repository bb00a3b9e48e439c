"""Command-line client for the toolkit's HTTP service.

Every command speaks JSON to the FastAPI app: in-process by default
(no server needed), or to a running instance via --server.  Spans are
written on the command line as semicolon-separated rows of
comma-separated rationals, e.g. "1,0" or "1,0,0;0,1,0".
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click
import httpx


def _call(server: str | None, method: str, path: str, body=None) -> httpx.Response:
    async def go():
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
                return await client.request(method, path, json=body)
        from .service import default_app

        transport = httpx.ASGITransport(app=default_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://flatfiber.internal", timeout=None
        ) as client:
            return await client.request(method, path, json=body)

    return asyncio.run(go())


def _request(ctx, method: str, path: str, body=None) -> dict:
    try:
        resp = _call(ctx.obj["server"], method, path, body)
    except httpx.HTTPError as err:
        raise click.ClickException(f"cannot reach service: {err}")
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise click.ClickException(str(detail))
    return resp.json()


def _parse_span(text: str) -> list[list[str]]:
    rows = []
    for chunk in text.split(";"):
        row = [x.strip() for x in chunk.split(",") if x.strip()]
        if not row:
            raise click.ClickException(f"empty span row in {text!r}")
        rows.append(row)
    return rows


def _structure_text(s: dict) -> str:
    parts = []
    if s["divisible_rank"]:
        parts.append(f"({s['divisible_symbol']})^{s['divisible_rank']}")
    parts.extend(f"Z/{d}" for d in s["invariant_factors"])
    return " x ".join(parts) if parts else "0"


@click.group()
@click.option("--server", default=None, metavar="URL", help="Remote service URL; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Exact-arithmetic toolkit for fibered crystallographic groups."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.group()
def catalog():
    """Inspect the packaged group catalog."""


@catalog.command("list")
@click.pass_context
def catalog_list(ctx):
    """List catalog groups."""
    data = _request(ctx, "GET", "/catalog")
    click.echo(f"{'name':<10} {'dim':>3} {'|point|':>8}  model-data")
    for g in data["groups"]:
        tag = "yes" if g["has_model_data"] else ""
        click.echo(f"{g['name']:<10} {g['dimension']:>3} {g['point_group_order']:>8}  {tag}")


@catalog.command("show")
@click.argument("name")
@click.pass_context
def catalog_show(ctx, name):
    """Print one group as canonical JSON."""
    data = _request(ctx, "GET", f"/catalog/{name}")
    click.echo(json.dumps(data, indent=2, sort_keys=True))


@main.command()
@click.argument("group")
@click.option("--fiber-dim", default=1, show_default=True)
@click.option("--bound", default=2, show_default=True)
@click.pass_context
def normals(ctx, group, fiber_dim, bound):
    """Enumerate complete normal subgroups of a catalog group."""
    data = _request(
        ctx,
        "POST",
        "/normal-subgroups",
        {"group": group, "fiber_dim": fiber_dim, "bound": bound},
    )
    subs = data["subgroups"]
    click.echo(f"{group}: {len(subs)} complete normal subgroup(s) at bound {bound}")
    for i, s in enumerate(subs):
        rows = "; ".join(",".join(r) for r in s["lattice"])
        click.echo(f"  [{i}] lattice {rows}  point parts {s['point_part_count']}")


@main.command()
@click.argument("group")
@click.argument("span")
@click.pass_context
def analyze(ctx, group, span):
    """Split a pair (GROUP, span subgroup) into fiber and base."""
    body = {"pair": {"group": group, "span": _parse_span(span)}}
    data = _request(ctx, "POST", "/analyze", body)
    click.echo(f"complete: {data['complete']}   structure check: {data['theorem1_ok']}")
    if data["complete"]:
        fiber, base = data["fiber"], data["base"]
        click.echo(
            f"fiber: dimension {data['fiber_dimension']}, "
            f"{len(fiber['coset_reps'])} point coset(s)"
        )
        click.echo(
            f"base:  dimension {data['base_dimension']}, "
            f"{len(base['coset_reps'])} point coset(s)"
        )


@main.command("pair-iso")
@click.argument("group1")
@click.argument("span1")
@click.argument("group2")
@click.argument("span2")
@click.option("--linear-bound", default=2, show_default=True)
@click.option("--translation-denominator", default=2, show_default=True)
@click.pass_context
def pair_iso(ctx, group1, span1, group2, span2, linear_bound, translation_denominator):
    """Bounded affine-conjugacy search between two pairs."""
    body = {
        "first": {"group": group1, "span": _parse_span(span1)},
        "second": {"group": group2, "span": _parse_span(span2)},
        "linear_bound": linear_bound,
        "translation_denominator": translation_denominator,
    }
    data = _request(ctx, "POST", "/pair-iso", body)
    click.echo(f"verdict: {data['verdict']}")
    if data["conjugator"] is not None:
        click.echo("conjugator matrix rows: " + "; ".join(",".join(r) for r in data["conjugator"]["matrix"]))
        click.echo("conjugator translation: " + ",".join(data["conjugator"]["translation"]))


@main.command()
@click.argument("group")
@click.argument("span")
@click.pass_context
def cohomology(ctx, group, span):
    """Cohomological invariants of a pair (GROUP, span subgroup)."""
    body = {"pair": {"group": group, "span": _parse_span(span)}}
    data = _request(ctx, "POST", "/cohomology", body)
    click.echo(f"H1 with torus coefficients: {_structure_text(data['h1_torus'])}")
    click.echo(f"H1 with span coefficients:  {_structure_text(data['h1_span'])}")
    kap = data["kappa_cokernel"]
    click.echo(f"comparison cokernel:        {_structure_text(kap['structure'])}")
    click.echo(
        f"  (hom level {_structure_text(kap['hom_level'])}, "
        f"finite level {_structure_text(kap['finite_level'])})"
    )


@main.command()
@click.option("--base", required=True, help="Catalog name of the base model.")
@click.option("--fiber", required=True, help="Catalog name of the fiber model.")
@click.option("--bound", default=2, show_default=True, help="Primitive-vector coordinate bound.")
@click.option("--ambient", multiple=True, help="Restrict the ambient pool to these groups.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the full result as JSON.")
@click.pass_context
def classify(ctx, base, fiber, bound, ambient, out):
    """Classify pairs with the given base and fiber models.

    Exits 2 when any split is only 'unresolved within bounds'.
    """
    body = {"base": base, "fiber": fiber, "bound": bound}
    if ambient:
        body["pool"] = list(ambient)
    data = _request(ctx, "POST", "/classify", body)
    click.echo(
        f"{len(data['records'])} class(es) for base {base}, fiber {fiber}, "
        f"bound {bound} over {len(data['pool'])} ambient group(s)"
    )
    for r in data["records"]:
        click.echo(
            f"  ({r['group']}, N) members {len(r['members'])}  "
            f"omega order {r['omega']['image_order']}  "
            f"H1 {_structure_text(r['h1_structure'])}  "
            f"coker {_structure_text(r['kappa_cokernel']['structure'])}"
        )
    for w in data["splits"]:
        click.echo(f"  split {w['first']['group']} / {w['second']['group']}: {w['kind']}")
    if out:
        out.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        click.echo(f"wrote {out}")
    if data["indeterminate"]:
        click.echo("indeterminate: some splits are unresolved within bounds", err=True)
        ctx.exit(2)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def verify(ctx, path):
    """Re-verify every merge certificate in a stored classification."""
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise click.ClickException(f"parse error at line {err.lineno}, column {err.colno}: {err.msg}")
    data = _request(ctx, "POST", "/verify", payload)
    click.echo(f"certificates verified: {data['certificates_checked']}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8077, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
