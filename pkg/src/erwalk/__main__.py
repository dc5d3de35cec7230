import sys

from erwalk.cli import main

sys.exit(main())
