from __future__ import annotations

import sys

from fraccal.cli import main_entry

main_entry()
