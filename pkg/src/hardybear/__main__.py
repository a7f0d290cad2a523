import sys

from hardybear.cli import main

sys.exit(main())
