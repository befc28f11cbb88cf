#pragma once

#include <string>
#include <vector>

#include "dflow/app.hpp"

namespace dflow::demo {

/// Registers the demo app corpus in this process's AppRegistry. Both the
/// CLI and the worker binary call it, so demo natives run on either
/// executor. Idempotent.
void register_demo_apps();

// Native apps.
AppSpec hello();         // -> "Hello world"
AppSpec sleep_hello();   // sleeps 5 s -> "Hello World!"
AppSpec communicate();   // (name) -> "hello <name>"
AppSpec noop();          // -> null
AppSpec sleep_ms();      // (ms) -> ms
AppSpec sort_numbers();  // (file) -> lexicographically sorted lines
AppSpec add();           // (ints...) -> wrapped sum
AppSpec mul_mix();       // (ints...) -> wrapped product mix
AppSpec xor_mix();       // (ints...) -> xor/rotate mix
AppSpec hash_mix();      // (ints...) -> splitmix-style digest
AppSpec fail_n_times();  // (kwargs counter_file, fail_count) -> "ok"

// Shell apps.
AppSpec shell_hello();   // echo "Hello world"
AppSpec shell_echo();    // echo {0}
AppSpec shell_cat();     // cat {inputs[0]} > {outputs[0]}
AppSpec shell_exit();    // exit {0}

/// Names of the registered pure integer apps (the randomized-DAG corpus).
const std::vector<std::string>& pure_int_apps();

}  // namespace dflow::demo
