"""A scripted browsing session against the live HTTP service.

Starts the service on an ephemeral port over a temporary network, follows
links the way a browser would (referer + redirect + session token), and
shows the displayed order changing in response.
"""

import json
import tempfile
import threading
import urllib.request
from urllib.parse import quote

from bucketnet import BucketService, init_network, make_server
from bucketnet.store import BucketStore

workdir = tempfile.mkdtemp(prefix="bucketnet-demo-")
store = BucketStore(workdir)
init_network(10, 3, 0.5, seed=21, store=store)

service = BucketService(store)
server = make_server(service, "127.0.0.1", 0)
port = server.server_address[1]
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{port}"
print(f"service on {base}, data in {workdir}\n")


def get_json(path: str) -> dict:
    with urllib.request.urlopen(base + path, timeout=5) as response:
        return json.loads(response.read().decode())


def show(payload: dict, heading: str) -> None:
    print(heading)
    for link in payload["links"]:
        print(f"    {link['target']}  ({link['weight']})")


portal = get_json("/b000?format=json&session=demo")
show(portal, "portal display, fresh network:")

# Click the LAST-ranked link twice: it must climb to the top.
target = portal["links"][-1]["target"]
for _ in range(2):
    redirect = quote(f"/{target}?method=display", safe="")
    url = f"{base}/b000?method=display&referer=b000&redirect={redirect}&session=demo"
    urllib.request.urlopen(url, timeout=5).read()
    # ... and walk back so the next click starts from the portal again.
    back = quote("/b000?method=display", safe="")
    urllib.request.urlopen(
        f"{base}/{target}?method=display&referer={target}&redirect={back}&session=demo",
        timeout=5,
    ).read()

after = get_json("/b000?format=json&session=demo")
show(after, f"\nportal display after clicking {target} twice:")

csv_text = urllib.request.urlopen(
    f"{base}/_analytics/centrality?metric=weighted&k=5", timeout=5
).read().decode()
print("\ntop-5 weighted degree:\n" + csv_text)

server.shutdown()
