import sys

from multcoinc.cli import main

sys.exit(main())
