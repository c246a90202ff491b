"""bd-cover entry point."""

import sys

from bd_cover.app.__main__ import main

if __name__ == "__main__":
    sys.exit(main())
