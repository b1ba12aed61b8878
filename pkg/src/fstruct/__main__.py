import sys

from fstruct.cli import main

sys.exit(main())
