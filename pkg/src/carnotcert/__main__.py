import sys

from carnotcert.cli import main

sys.exit(main())
