import logging
from pathlib import Path
from typing import Optional

import requests


class InstanceLibraryClient:
    """
    Client class to download MaxCut instance files ("n m" header + "u v w"
    lines) from a remote instance library laid out as <base_url>/<name>.
    """

    def __init__(self, base_url: str, timeout: float = 30.0):
        if not base_url:
            raise ValueError("[InstanceLibraryClient] a base URL is required (MATCHGATE_INSTANCE_URL or --instance-url)")
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        logging.info(f"[InstanceLibraryClient] Initialized with base URL: {self.base_url}")

    def url_for(self, name: str) -> str:
        return f"{self.base_url}/{name.lstrip('/')}"

    def fetch(self, name: str) -> str:
        url = self.url_for(name)
        logging.info(f"[InstanceLibraryClient] Fetching {url}")
        response = requests.get(url, timeout=self.timeout)

        if response.status_code == 200:
            logging.info(f"[InstanceLibraryClient] Received {len(response.text)} bytes.")
            return response.text
        logging.error(f"[InstanceLibraryClient] Fetch failed with status: {response.status_code}")
        response.raise_for_status()
        raise RuntimeError(f"[InstanceLibraryClient] unexpected status {response.status_code} for {url}")

    def fetch_cached(self, name: str, cache_dir: Optional[Path]) -> str:
        """Reuse <cache_dir>/<name> when present; otherwise download and store it there."""
        if cache_dir is None:
            return self.fetch(name)
        target = Path(cache_dir) / Path(name).name
        if target.exists():
            logging.info(f"[InstanceLibraryClient] Using cached copy {target}")
            return target.read_text()
        text = self.fetch(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
        return text
