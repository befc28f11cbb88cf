#include "dflow/app.hpp"

#include <cctype>
#include <sstream>

#include "dflow/errors.hpp"

namespace dflow {

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
    return true;
}

bool is_index(std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
}

// Splits "inputs[3]" -> ("inputs", 3). Returns false if not of that shape.
bool parse_indexed(std::string_view s, std::string_view& name, std::size_t& index) {
    auto open = s.find('[');
    if (open == std::string_view::npos || s.back() != ']') return false;
    name = s.substr(0, open);
    std::string_view idx = s.substr(open + 1, s.size() - open - 2);
    if (!is_index(idx)) return false;
    index = 0;
    for (char ch : idx) index = index * 10 + static_cast<std::size_t>(ch - '0');
    return true;
}

bool valid_placeholder(std::string_view body) {
    if (is_index(body) || is_identifier(body)) return true;
    std::string_view name;
    std::size_t idx;
    return parse_indexed(body, name, idx) && (name == "inputs" || name == "outputs");
}

// Walks the template, calling on_literal(char) and on_placeholder(body).
// Shared by define-time validation and render-time substitution.
template <typename LiteralFn, typename PlaceholderFn>
void walk_template(const std::string& tmpl, LiteralFn on_literal, PlaceholderFn on_placeholder) {
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        char ch = tmpl[i];
        if (ch == '{') {
            if (i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
                on_literal('{');
                ++i;
                continue;
            }
            auto close = tmpl.find('}', i + 1);
            if (close == std::string::npos)
                throw TemplateError("unbalanced '{' at position " + std::to_string(i));
            std::string body = tmpl.substr(i + 1, close - i - 1);
            if (!valid_placeholder(body))
                throw TemplateError("malformed placeholder {" + body + "}");
            on_placeholder(body);
            i = close;
        } else if (ch == '}') {
            if (i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
                on_literal('}');
                ++i;
                continue;
            }
            throw TemplateError("unbalanced '}' at position " + std::to_string(i));
        } else {
            on_literal(ch);
        }
    }
}

std::string render_arg(const ArgValue& v, const std::string& placeholder) {
    const auto& st = v.storage();
    if (const auto* s = std::get_if<std::string>(&st)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&st)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&st)) {
        std::ostringstream os;
        os << *d;
        return os.str();
    }
    if (const auto* b = std::get_if<bool>(&st)) return *b ? "true" : "false";
    if (const auto* f = std::get_if<FileRef>(&st)) {
        if (f->is_staged()) return f->filepath().string();
        if (f->scheme() == FileScheme::local) return f->source();
        throw RenderError("{" + placeholder + "}: remote file is not staged");
    }
    throw RenderError("{" + placeholder + "}: value has no textual rendering");
}

std::string render_file(const FileRef& f) {
    // Outputs are rendered before they exist: the declared local target path.
    if (f.is_staged()) return f.filepath().string();
    if (f.scheme() == FileScheme::local) return f.source();
    throw RenderError("remote file " + f.source() + " is not staged");
}

}  // namespace

AppSpec define_native_app(std::string name, NativeFn fn, AppOptions options) {
    AppSpec spec;
    spec.kind = AppSpec::Kind::native;
    spec.name = std::move(name);
    spec.callable = fn;
    spec.executor_label = std::move(options.executor_label);
    spec.retry_override = options.retry_override;
    AppRegistry::instance().register_native(spec.name, std::move(fn));
    return spec;
}

AppSpec define_shell_app(std::string name, std::string command_template, AppOptions options) {
    if (command_template.empty()) throw TemplateError("empty command template");
    // Validate placeholders up front; rendering repeats the walk.
    walk_template(
        command_template, [](char) {}, [](const std::string&) {});
    AppSpec spec;
    spec.kind = AppSpec::Kind::shell;
    spec.name = std::move(name);
    spec.command_template = std::move(command_template);
    spec.executor_label = std::move(options.executor_label);
    spec.retry_override = options.retry_override;
    return spec;
}

std::string render_command(const std::string& command_template, const ArgList& args,
                           const ArgMap& kwargs, std::span<const FileRef> inputs,
                           std::span<const FileRef> outputs) {
    std::string out;
    out.reserve(command_template.size());
    walk_template(
        command_template, [&](char ch) { out.push_back(ch); },
        [&](const std::string& body) {
            if (is_index(body)) {
                std::size_t idx = std::stoul(body);
                if (idx >= args.size())
                    throw RenderError("{" + body + "}: only " + std::to_string(args.size()) +
                                      " positional args");
                out += render_arg(args[idx], body);
                return;
            }
            std::string_view name;
            std::size_t idx;
            if (parse_indexed(body, name, idx)) {
                const auto& files = (name == "inputs") ? inputs : outputs;
                if (idx >= files.size())
                    throw RenderError("{" + body + "}: index out of range (have " +
                                      std::to_string(files.size()) + ")");
                out += render_file(files[idx]);
                return;
            }
            auto it = kwargs.find(body);
            if (it == kwargs.end()) throw RenderError("unbound placeholder {" + body + "}");
            out += render_arg(it->second, body);
        });
    return out;
}

AppRegistry& AppRegistry::instance() {
    static AppRegistry reg;
    return reg;
}

void AppRegistry::register_native(const std::string& name, NativeFn fn) {
    std::lock_guard lk(m_);
    fns_[name] = std::move(fn);  // re-registration replaces
}

const NativeFn* AppRegistry::find(const std::string& name) const {
    std::lock_guard lk(m_);
    auto it = fns_.find(name);
    return it == fns_.end() ? nullptr : &it->second;
}

std::vector<std::string> AppRegistry::names() const {
    std::lock_guard lk(m_);
    std::vector<std::string> out;
    out.reserve(fns_.size());
    for (const auto& [k, _] : fns_) out.push_back(k);
    return out;
}

}  // namespace dflow
