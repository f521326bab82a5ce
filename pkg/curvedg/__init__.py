# SPDX-License-Identifier: LGPL-3.0-or-later
__version__ = "0.4.0"
