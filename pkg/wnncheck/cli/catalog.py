from wasabi import Printer

from wnncheck.catalog import list_catalog

from ._util import cli


@cli.command("catalog")
def catalog() -> None:
    """List the catalog scenarios with the dimensions of 𝔨, 𝔮 and 𝔪"""
    msg = Printer()
    msg.divider("Catalog scenarios")
    rows = [
        (e.id, e.algebra, e.dim_k, e.dim_q, e.dim_m, ", ".join(e.flags), e.description)
        for e in list_catalog()
    ]
    msg.table(
        rows,
        header=("id", "algebra", "dim k", "dim q", "dim m", "flags", "description"),
        divider=True,
    )
