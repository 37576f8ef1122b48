"""Regenerates the frozen fixtures and oracle values under tests/data.

Independent of the C++ code: uses only the Python standard library.
Run from the repository root: python3 tests/oracles/gen_fixtures.py
"""
import gzip
import hashlib
import json
import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"

TABLE = [
    ("device", "6ES7 151-8AB00-0AB0", 30, "ET200S"),
    ("device", "6ES7 322-1BH01-0AA0", 60, "S7-300"),
    ("device", "6ES7 212-1BE40-0XB0", 30, "S7-1200"),
    ("device", "6ES7 214-1AG40-0XB0", 30, "S7-1200"),
    ("device", "6ES7 215-1AG40-0XB0", 30, "S7-1200"),
    ("device", "6ES7 522-1BL10-0AA0", 255, "S7-1500"),
    ("os", "Linux", 64, None),
    ("os", "Windows", 128, None),
]


def write_table():
    lines = ["# kind,label,ttl[,range]"]
    for kind, label, ttl, rng in TABLE:
        lines.append(",".join([kind, label, str(ttl)] + ([rng] if rng else [])))
    (DATA / "fingerprint_table.csv").write_text("\n".join(lines) + "\n")


def verdict(value):
    best = min(abs(value - t) for _, _, t, _ in TABLE)
    kinds = {k for k, _, t, _ in TABLE if abs(value - t) == best}
    if len(kinds) > 1:
        return "Inconclusive"
    return "Device" if kinds == {"device"} else "Honeypot"


def write_sweep():
    # Every original TTL 1..255 against return-path asymmetry -3..+3.
    # A positive asymmetry shortens the reconstruction by that many hops.
    rows = ["original_ttl,asymmetry,reconstructed,verdict,baseline"]
    for ttl in range(1, 256):
        base = verdict(ttl)
        for a in range(-3, 4):
            rec = ttl - a
            rows.append(f"{ttl},{a},{rec},{verdict(rec)},{base}")
    (DATA / "asymmetry_sweep.csv").write_text("\n".join(rows) + "\n")


def write_hashes():
    rng = random.Random(20231001)
    addrs = ["1.2.3.4", "0.0.0.0", "255.255.255.255", "10.0.0.1", "192.168.1.100"]
    while len(addrs) < 100:
        a = ".".join(str(rng.randrange(256)) for _ in range(4))
        if a not in addrs:
            addrs.append(a)
    rows = ["address,sha256,sha256_salted"]
    for a in addrs:
        rows.append(f"{a},{hashlib.sha256(a.encode()).hexdigest()},"
                    f"{hashlib.sha256(('pepper' + a).encode()).hexdigest()}")
    (DATA / "address_hashes.csv").write_text("\n".join(rows) + "\n")


def banner(ip, port, query, org="", tags=(), data="", ports=None):
    b = {"ip_str": ip, "port": port, "org": org, "tags": list(tags), "data": data,
         "origin_query": query}
    if ports is not None:
        b["ports"] = ports
    return json.dumps(b, sort_keys=True)


def write_export():
    lines = []
    # 15 distinct 6ES7 hosts.
    for i in range(15):
        lines.append(banner(f"203.0.113.{10 + i}", 102, "6ES7",
                            org="Amazon.com, Inc." if i % 3 == 0 else "Example Telecom",
                            data=f"Module type: CPU 315-2 PN/DP\nModule: 6ES7 315-2EH14-0AB0 v.{i}"))
    # Honeypot-ish hosts found by two queries each (duplicates across queries).
    lines.append(banner("198.51.100.7", 21, "Technodrome", org="DigitalOcean, LLC",
                        tags=["honeypot"], data="220 Technodrome - Mouser Factory FTP"))
    lines.append(banner("198.51.100.7", 21, "Mouser", org="DigitalOcean, LLC",
                        tags=["honeypot"], data="220 Technodrome - Mouser Factory FTP"))
    lines.append(banner("198.51.100.8", 21, "Technodrome", org="Linode", tags=["honeypot"],
                        data="220 Technodrome - Mouser Factory FTP"))
    lines.append(banner("198.51.100.8", 21, "Mouser", org="Linode", tags=["honeypot", "ftp"],
                        data="220 Technodrome - Mouser Factory FTP"))
    lines.append(banner("198.51.100.9", 23, "Mouser", org="Vultr Holdings", tags=["honeypot"],
                        data="Mouser Factory telnet"))
    # Same host seen on two ports by the 6ES7 query.
    lines.append(banner("203.0.113.10", 161, "6ES7", org="Amazon.com, Inc.",
                        data="SNMP sysDescr Siemens, SIMATIC S7, 6ES7 315-2EH14-0AB0"))
    # Same host by the MAC query.
    lines.append(banner("203.0.113.11", 102, "00:1c:06", org="Example Telecom",
                        data="Module: 6ES7 315-2EH14-0AB0"))
    lines.append(banner("192.0.2.50", 502, "00:1c:06", org="Example Telecom",
                        data="VIPA 315-4NE12 Module: 6ES7 315-4NE12-0AB0"))
    assert len(lines) == 23
    lines.insert(7, '{"ip_str": "203.0.113.99", "port": 102, "data": "truncated')
    lines.insert(19, "not json at all")
    assert len(lines) == 25
    text = "\n".join(lines) + "\n"
    (DATA / "shodan_export.ndjson").write_text(text)
    (DATA / "shodan_export.ndjson.gz").write_bytes(gzip.compress(text.encode(), mtime=0))
    ips = [json.loads(l)["ip_str"] for l in lines if l.startswith('{"data"')]
    assert len(ips) == 23 and len(set(ips)) == 19


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    write_table()
    write_sweep()
    write_hashes()
    write_export()
