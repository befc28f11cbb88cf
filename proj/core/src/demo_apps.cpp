#include "dflow/demo_apps.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dflow/errors.hpp"

namespace dflow::demo {

namespace {

std::uint64_t uarg(const ArgValue& v) { return static_cast<std::uint64_t>(v.as_int()); }

std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

ArgValue native_hello(const AppArgs&) { return ArgValue("Hello world"); }

ArgValue native_sleep_hello(const AppArgs&) {
    std::this_thread::sleep_for(std::chrono::seconds(5));
    return ArgValue("Hello World!");
}

ArgValue native_communicate(const AppArgs& a) {
    if (a.args.empty()) throw std::runtime_error("communicate needs a name argument");
    return ArgValue("hello " + a.args[0].as_text());
}

ArgValue native_noop(const AppArgs&) { return ArgValue(); }

ArgValue native_sleep_ms(const AppArgs& a) {
    std::int64_t ms = a.args.empty() ? 0 : a.args[0].as_int();
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    return ArgValue(ms);
}

ArgValue native_sort_numbers(const AppArgs& a) {
    if (a.args.empty() || !a.args[0].is<FileRef>())
        throw std::runtime_error("sort_numbers needs a file argument");
    std::ifstream in(a.args[0].as<FileRef>().filepath());
    if (!in) throw std::runtime_error("cannot open input file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        lines.push_back(line);
    }
    std::sort(lines.begin(), lines.end());
    ArgList out;
    out.reserve(lines.size());
    for (auto& l : lines) out.emplace_back(std::move(l));
    return ArgValue(std::move(out));
}

ArgValue native_add(const AppArgs& a) {
    std::uint64_t acc = 0;
    for (const auto& v : a.args) acc += uarg(v);
    return ArgValue(wrap(acc));
}

ArgValue native_mul_mix(const AppArgs& a) {
    std::uint64_t acc = 1;
    for (const auto& v : a.args) acc = acc * 0x100000001b3ULL + uarg(v);
    return ArgValue(wrap(acc));
}

ArgValue native_xor_mix(const AppArgs& a) {
    std::uint64_t acc = 0x243f6a8885a308d3ULL;
    for (const auto& v : a.args) {
        acc ^= uarg(v);
        acc = (acc << 13) | (acc >> 51);
    }
    return ArgValue(wrap(acc));
}

ArgValue native_hash_mix(const AppArgs& a) {
    std::uint64_t acc = 0x9e3779b97f4a7c15ULL;
    for (const auto& v : a.args) {
        std::uint64_t x = acc + uarg(v);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        acc = x;
    }
    return ArgValue(wrap(acc));
}

// Fails until the counter file records fail_count earlier attempts. The
// counter lives on disk so retried attempts see it from any process.
ArgValue native_fail_n_times(const AppArgs& a) {
    auto cf = a.kwargs.find("counter_file");
    auto fc = a.kwargs.find("fail_count");
    if (cf == a.kwargs.end() || fc == a.kwargs.end())
        throw std::runtime_error("fail_n_times needs counter_file and fail_count kwargs");
    const std::string path = cf->second.as_text();
    std::int64_t fail_count = fc->second.as_int();

    std::int64_t attempts = 0;
    if (std::ifstream in(path); in) in >> attempts;
    ++attempts;
    std::ofstream out(path, std::ios::trunc);
    out << attempts;
    out.close();

    if (attempts <= fail_count)
        throw std::runtime_error("induced failure, attempt " + std::to_string(attempts));
    return ArgValue("ok");
}

}  // namespace

void register_demo_apps() {
    static std::once_flag once;
    std::call_once(once, [] {
        define_native_app("hello", native_hello);
        define_native_app("sleep_hello", native_sleep_hello);
        define_native_app("communicate", native_communicate);
        define_native_app("noop", native_noop);
        define_native_app("sleep_ms", native_sleep_ms);
        define_native_app("sort_numbers", native_sort_numbers);
        define_native_app("add", native_add);
        define_native_app("mul_mix", native_mul_mix);
        define_native_app("xor_mix", native_xor_mix);
        define_native_app("hash_mix", native_hash_mix);
        define_native_app("fail_n_times", native_fail_n_times);
    });
}

namespace {
AppSpec named_native(const std::string& name) {
    register_demo_apps();
    AppSpec spec;
    spec.kind = AppSpec::Kind::native;
    spec.name = name;
    spec.callable = *AppRegistry::instance().find(name);
    return spec;
}
}  // namespace

AppSpec hello() { return named_native("hello"); }
AppSpec sleep_hello() { return named_native("sleep_hello"); }
AppSpec communicate() { return named_native("communicate"); }
AppSpec noop() { return named_native("noop"); }
AppSpec sleep_ms() { return named_native("sleep_ms"); }
AppSpec sort_numbers() { return named_native("sort_numbers"); }
AppSpec add() { return named_native("add"); }
AppSpec mul_mix() { return named_native("mul_mix"); }
AppSpec xor_mix() { return named_native("xor_mix"); }
AppSpec hash_mix() { return named_native("hash_mix"); }
AppSpec fail_n_times() { return named_native("fail_n_times"); }

AppSpec shell_hello() { return define_shell_app("shell_hello", "echo \"Hello world\""); }
AppSpec shell_echo() { return define_shell_app("shell_echo", "echo {0}"); }
AppSpec shell_cat() { return define_shell_app("shell_cat", "cat {inputs[0]} > {outputs[0]}"); }
AppSpec shell_exit() { return define_shell_app("shell_exit", "exit {0}"); }

const std::vector<std::string>& pure_int_apps() {
    static const std::vector<std::string> names = {"add", "mul_mix", "xor_mix", "hash_mix"};
    return names;
}

}  // namespace dflow::demo
