import sys

from dagedf.cli import main

sys.exit(main())
