from giantatom.writers.csv_writer import read_rows, write_csv
from giantatom.writers.manifest import ResultManifest, sha256_file, sha256_text, write_manifest

__all__ = ["ResultManifest", "read_rows", "sha256_file", "sha256_text", "write_csv", "write_manifest"]
