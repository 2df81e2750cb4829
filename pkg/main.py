import sys

from src.quantstream.cli import main

if __name__ == '__main__':
    sys.exit(main())
