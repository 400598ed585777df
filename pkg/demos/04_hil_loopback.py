"""
Plant and controller over a socket
==================================

Runs the plant server and the controller client in one process on two
threads, over TCP on localhost, and checks the result against the
in-process hierarchical run.
"""

import threading

from twptr import ScenarioConfig, SessionConfig, controller_client, plant_serve, run_scenario
from twptr.hil import decode

scenario = ScenarioConfig(duration=0.07)
transcript, ready, port, result = [], threading.Event(), [], {}


def serve():
    result["traj"] = plant_serve(SessionConfig(endpoint="127.0.0.1:0", report_sync=True), scenario,
                                 ready=lambda addr: (port.append(addr[1]), ready.set()), transcript=transcript)


thread = threading.Thread(target=serve)
thread.start()
ready.wait()
log = controller_client(SessionConfig(endpoint=f"127.0.0.1:{port[0]}", report_sync=True), scenario.robot, scenario.motor)
thread.join()

# %%
# The wire
# --------
for line in transcript[:8]:
    print(line.decode().rstrip(), "  ->", decode(line))
print("...", len(transcript), "lines")

# %%
# Transparency
# ------------
same = result["traj"].rows() == run_scenario(scenario).rows()
print("networked trajectory bit-identical to in-process run:", same)
print("ticks in sync:", sum(v.in_sync for v in log.sync), "of", len(log))
