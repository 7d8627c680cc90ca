import sys

from airylab.cli import main

sys.exit(main())
