"""
OverHear Toolkit - Main Package
===============================

Keystroke inference from headphone audio and head-worn accelerometers:
filtering, segmentation, hand clustering, MFCC features, key and word
prediction, plus a synthetic session generator for verification.
"""

__version__ = "1.0.0"
__author__ = "OverHear Team"
