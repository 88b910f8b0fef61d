import sys

from dialecto.cli import main

sys.exit(main())
