"""Server entry point."""

from __future__ import annotations

from pathlib import Path

import click


@click.command()
@click.option("--db", default="annokit.db", show_default=True, help="SQLite database path.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8070, show_default=True, type=int)
@click.option("--ui-dir", default=None, help="Static frontend build to serve at /ui.")
@click.option("--bootstrap-admin", default=None, metavar="NAME:PASSWORD",
              help="Create an administrator account if it does not exist.")
def main(db, host, port, ui_dir, bootstrap_admin):
    """Run the annotation service."""
    import uvicorn

    from ..store import AnnotationStore, ROLE_ADMIN, UnknownUser
    from .app import create_app

    store = AnnotationStore(db)
    if bootstrap_admin:
        name, _, password = bootstrap_admin.partition(":")
        try:
            store.find_user(name)
        except UnknownUser:
            store.create_user(name, ROLE_ADMIN, secret=password or "admin")
            click.echo(f"created administrator {name!r}")
    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[3] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    app = create_app(store=store, static_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
