#pragma once

namespace dflow {

/// Entry point of the worker-host process (the dflow-worker binary).
/// Connects back to the executor, announces itself, runs `--workers` task
/// threads, heartbeats every `--heartbeat-ms`, and exits on a shutdown
/// frame (after draining) or on connection loss.
int worker_main(int argc, char** argv);

}  // namespace dflow
