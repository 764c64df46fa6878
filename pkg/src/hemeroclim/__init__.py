"""Curation of historical newspaper collections into a geo-temporally
tagged history of climatologic events.

The package is organized around the curation loop: ingest articles into a
document store (`corpus`), run the linguistic preprocessing pipeline that
builds per-article content trees and event candidates (`pipeline`), manage
per-country meteorological vocabularies (`vocab`), rewrite and evaluate
keyword queries (`query`), resolve toponyms (`geo`), validate candidates
through the human-in-the-loop workflow (`curation`), and run spatio-temporal
analytics over the resulting event history (`events`). `service` exposes the
whole loop over HTTP and `cli` from the command line.
"""

__version__ = "0.1.0"
