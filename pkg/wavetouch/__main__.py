import sys

from wavetouch.cli import main

sys.exit(main())
