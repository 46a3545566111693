import sys

from hypsmooth.cli import main

sys.exit(main())
