"""
Root pytest configuration: keep test runs out of the rotating log files.
"""
import os

os.environ['LOG_TO_FILE'] = 'false'
