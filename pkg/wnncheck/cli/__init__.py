from . import catalog, run  # noqa: F401
from ._util import cli


def main():
    cli.run()


if __name__ == "__main__":
    main()
