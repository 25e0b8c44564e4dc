import sys

from willmore_tori.cli_reports.cli import main

sys.exit(main())
