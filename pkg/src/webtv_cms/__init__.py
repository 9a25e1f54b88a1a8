"""User-driven content management service for open IPTV-style three-screen
delivery: feed aggregation, on-demand device-aware transcoding, deployment
with SNS sharing, and the normalized cost model behind the design."""

__version__ = "0.1.0"
