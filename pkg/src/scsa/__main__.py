import sys

from scsa.cli import main

sys.exit(main())
