import sys

from pconvex.cli.main import main

sys.exit(main())
