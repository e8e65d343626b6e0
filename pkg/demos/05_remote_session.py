"""Drive an environment across a process boundary.

Starts the wire-protocol server in a background thread and holds a raw
socket conversation with it: every message is one JSON object per line.
The safebench-client package wraps exactly this exchange in a
Gymnasium-style object.
"""

import json
import socket
import threading

from safebench.server import EnvServer

server = EnvServer(port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
print(f"server listening on 127.0.0.1:{server.port}\n")

sock = socket.create_connection(("127.0.0.1", server.port))
wire = sock.makefile("rw", encoding="utf-8")


def send(request):
    print(f">> {json.dumps(request)}")
    wire.write(json.dumps(request) + "\n")
    wire.flush()
    response = wire.readline().strip()
    print(f"<< {response}\n")
    return json.loads(response)


send({"v": 1, "cmd": "make", "config": {"level": 1}})
send({"v": 1, "cmd": "reset", "seed": 7})
send({"v": 1, "cmd": "step", "action": [-1.0, 0.0]})
send({"v": 1, "cmd": "step", "action": [-1.0, 0.0]})
print("-- a malformed line is answered with an error and otherwise ignored --")
wire.write("this is not json\n")
wire.flush()
print(f"<< {wire.readline().strip()}\n")
send({"v": 1, "cmd": "step", "action": [0.0, 1.0]})
send({"v": 1, "cmd": "config"})
send({"v": 1, "cmd": "close"})

sock.close()
server.shutdown()
server.server_close()
print("session closed")
