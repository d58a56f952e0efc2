import sys

from lagcoh.cli import main

sys.exit(main())
