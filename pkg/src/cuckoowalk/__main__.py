import sys

from cuckoowalk.cli import main

sys.exit(main())
