import hashlib
import json
import os
from typing import Any, Dict, List

from pydantic import BaseModel

MANIFEST_NAME = 'manifest.json'


class FileRecord(BaseModel):
    name: str
    sha256: str


class ResultManifest(BaseModel):
    """What a run produced and how to reproduce it."""

    config: Dict[str, Any]
    config_sha256: str
    tool_version: str
    wall_time: float
    status: str = 'ok'
    exit_code: int = 0
    files: List[FileRecord] = []
    extras: Dict[str, Any] = {}


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as d:
        for block in iter(lambda: d.read(1 << 16), b''):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(out_dir: str, manifest: ResultManifest) -> str:
    """
    Atomically writes manifest.json into out_dir (temporary file, then os.replace).

    :param out_dir: Output directory holding the data files.
    :param manifest: Manifest to write.
    :return: Path of the manifest.
    """
    path = os.path.join(out_dir, MANIFEST_NAME)
    tmp = path + '.tmp'
    with open(tmp, 'w') as d:
        json.dump(manifest.model_dump(mode='json'), d, indent=2, sort_keys=True)
        d.flush()
        os.fsync(d.fileno())
    os.replace(tmp, path)
    return path
