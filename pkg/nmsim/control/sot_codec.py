"""
SOT二进制编解码
魔数 "SOT1" + 版本字节 + 行数(uint32 LE) + 程序名字节数(uint16 LE)，随后为UTF-8程序名
与定宽小端行，字段顺序见SOT_FIELDS
"""

import struct

import numpy as np

from ..exceptions.custom_exceptions import FormatException
from ..models.sot_models import SOT_FIELDS, SotProgram, SotRow

SOT_MAGIC = b"SOT1"
SOT_VERSION = 1
SOT_HEADER = struct.Struct("<4sBIH")
ROW_DTYPE = np.dtype([(name, '<u4') for name in SOT_FIELDS])


def save_sot(program: SotProgram) -> bytes:
    """序列化SOT程序"""
    name = program.name.encode("utf-8")
    if len(name) > 0xFFFF:
        raise FormatException(f"SOT program name is {len(name)} bytes, at most 65535 fit the header")
    table = np.zeros(len(program.rows), dtype=ROW_DTYPE)
    for i, row in enumerate(program.rows):
        table[i] = tuple(row.to_words())
    return SOT_HEADER.pack(SOT_MAGIC, SOT_VERSION, len(program.rows), len(name)) + name + table.tobytes()


def load_sot(blob: bytes) -> SotProgram:
    """
    解析SOT程序

    Raises:
        FormatException: 魔数/版本错误、程序名不是UTF-8或数据被截断
    """
    if len(blob) < SOT_HEADER.size:
        raise FormatException(f"Truncated SOT header: {len(blob)} bytes")
    magic, version, count, name_size = SOT_HEADER.unpack_from(blob, 0)
    if magic != SOT_MAGIC:
        raise FormatException(f"Bad SOT magic {magic!r}, expected {SOT_MAGIC!r}")
    if version != SOT_VERSION:
        raise FormatException(f"Unsupported SOT version {version}")
    rows_offset = SOT_HEADER.size + name_size
    expected = rows_offset + count * ROW_DTYPE.itemsize
    if len(blob) != expected:
        raise FormatException(f"SOT data has {len(blob)} bytes, expected {expected} for {count} rows")

    try:
        name = blob[SOT_HEADER.size:rows_offset].decode("utf-8")
    except UnicodeDecodeError as e:
        raise FormatException(f"SOT program name is not UTF-8: {str(e)}", cause=e)
    table = np.frombuffer(blob, dtype=ROW_DTYPE, count=count, offset=rows_offset)
    try:
        rows = [SotRow.from_words([int(record[field]) for field in SOT_FIELDS]) for record in table]
    except ValueError as e:
        raise FormatException(f"Invalid SOT row: {str(e)}", cause=e)
    return SotProgram(name=name, rows=rows)
