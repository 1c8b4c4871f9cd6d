"""
Derivação de seeds por replicação
"""
import hashlib
from typing import List

SEED_BYTES = 8


def derive_seed(master_seed: int, replication: int) -> int:
    """seed_i = blake2b(master_seed, i) truncado em 64 bits"""
    if master_seed < 0 or replication < 0:
        raise ValueError("master_seed e replication devem ser >= 0")
    payload = master_seed.to_bytes(8, "little") + replication.to_bytes(8, "little")
    digest = hashlib.blake2b(payload, digest_size=SEED_BYTES, person=b"rconvex-rep").digest()
    return int.from_bytes(digest, "little")


def derive_seeds(master_seed: int, replications: int) -> List[int]:
    return [derive_seed(master_seed, i) for i in range(replications)]
