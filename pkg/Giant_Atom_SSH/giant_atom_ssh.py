import sys

from giantatom.cli import main


def run():
    sys.exit(main())


if __name__ == '__main__':
    run()
