import sys

from .bornstat_cli import main

sys.exit(main())
