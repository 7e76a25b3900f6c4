import sys

from randdiv.cli import main

sys.exit(main())
