# -*- coding: utf-8 -*-

__author__ = """pySemiflowLab developers"""
__version__ = '0.1.0'
