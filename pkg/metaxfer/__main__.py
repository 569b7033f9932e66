import sys

from metaxfer.cli import main

sys.exit(main())
