import sys

from pra.cli import main

sys.exit(main())
