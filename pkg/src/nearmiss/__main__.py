import sys

from nearmiss.cli import main

sys.exit(main())
