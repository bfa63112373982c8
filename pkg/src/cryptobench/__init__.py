"""Cryptanalysis workbench for a set of olympiad cipher and hash problems."""

from .algebra import Gf2nField, balanced_decode, balanced_encode, dickson_eval
from .boolfun import VectorialMap, conjecture_verify, enumerate_apn_involutions, is_apn, sbox_metrics
from .curl27 import curl_hash, curlf, fragmentation_collision_attack, verify_collision
from .lattice import FactoringInstance, factor_with_hint, lagrange_gauss
from .slpvm import parse_program, run, validate, verify_equivalence
from .twinpeaks import Block128, Oracle, slide_attack_decrypt

__version__ = "0.1.0"
