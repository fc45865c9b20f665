import sys

from nbwalk.cli import main

sys.exit(main())
