import sys

from beepnet.cli import main

sys.exit(main())
