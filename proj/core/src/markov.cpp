#include "tempora/markov.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tempora/errors.hpp"
#include "tempora/text.hpp"

namespace tempora::markov {

namespace {

// Out-of-band stand-in for the ESC slot in serialized context strings.
constexpr char32_t kEscapeCodepoint = U'￿';
constexpr double kLiteralBits = 16.0;

void check_order(int order) {
    if (order != 1 && order != 2) {
        throw ConfigError("model order must be 1 or 2, got " + std::to_string(order));
    }
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0)) {
        throw ConfigError("smoothing alpha must be positive, got " +
                          std::to_string(alpha));
    }
}

}  // namespace

const char* to_string(OovPolicy policy) {
    return policy == OovPolicy::escape_symbol ? "escape_symbol" : "clamp";
}

Alphabet Alphabet::build(const std::vector<std::u32string>& texts, OovPolicy policy) {
    std::set<char32_t> uniq;
    for (const auto& t : texts) {
        for (char32_t c : t) {
            if (c != kEscapeCodepoint) uniq.insert(c);
        }
    }
    if (uniq.empty()) {
        throw DataError("cannot build an alphabet from empty texts");
    }
    Alphabet a;
    a.symbols_.assign(uniq.begin(), uniq.end());
    a.policy_ = policy;
    a.escape_ = policy == OovPolicy::escape_symbol;
    return a;
}

Alphabet Alphabet::from_symbols(std::vector<char32_t> symbols, OovPolicy policy,
                                bool has_escape) {
    if (symbols.empty() && !has_escape) {
        throw DataError("alphabet must contain at least one symbol");
    }
    if (!std::is_sorted(symbols.begin(), symbols.end()) ||
        std::adjacent_find(symbols.begin(), symbols.end()) != symbols.end()) {
        throw ModelError("alphabet symbols must be sorted and distinct");
    }
    Alphabet a;
    a.symbols_ = std::move(symbols);
    a.policy_ = policy;
    a.escape_ = has_escape;
    return a;
}

std::ptrdiff_t Alphabet::index_of(char32_t cp) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), cp);
    if (it == symbols_.end() || *it != cp) return -1;
    return it - symbols_.begin();
}

ContextModel::ContextModel(int order, double alpha, Alphabet alphabet)
    : order_(order), alpha_(alpha), alphabet_(std::move(alphabet)) {
    check_order(order_);
    check_alpha(alpha_);
}

std::uint64_t ContextModel::context_key(const std::uint64_t* context) const {
    if (order_ == 1) return context[0];
    return context[0] * static_cast<std::uint64_t>(alphabet_.size()) + context[1];
}

void ContextModel::add_observation(const std::uint64_t* context, std::size_t next,
                                   std::uint64_t n) {
    auto& slot = contexts_[context_key(context)];
    slot.by_symbol[static_cast<std::uint32_t>(next)] += n;
    slot.total += n;
}

double ContextModel::probability_by_index(const std::uint64_t* context,
                                          std::size_t next) const {
    const double size = static_cast<double>(alphabet_.size());
    auto it = contexts_.find(context_key(context));
    if (it == contexts_.end()) return 1.0 / size;
    const auto& slot = it->second;
    auto cit = slot.by_symbol.find(static_cast<std::uint32_t>(next));
    const double count = cit == slot.by_symbol.end()
                             ? 0.0
                             : static_cast<double>(cit->second);
    return (count + alpha_) / (static_cast<double>(slot.total) + alpha_ * size);
}

namespace {

// Maps a symbol to its model index, applying the OOV policy. Returns
// false under clamp when the symbol is unknown.
bool resolve_index(const Alphabet& a, char32_t cp, std::uint64_t* out, bool* was_oov) {
    std::ptrdiff_t idx = a.index_of(cp);
    if (idx >= 0) {
        *out = static_cast<std::uint64_t>(idx);
        return true;
    }
    if (was_oov) *was_oov = true;
    if (a.has_escape()) {
        *out = static_cast<std::uint64_t>(a.escape_index());
        return true;
    }
    return false;
}

}  // namespace

std::uint64_t ContextModel::count_of(const std::u32string& context,
                                     char32_t next) const {
    if (context.size() != static_cast<std::size_t>(order_)) {
        throw ConfigError("context length must equal the model order");
    }
    std::uint64_t ctx[2] = {0, 0};
    std::uint64_t nxt = 0;
    for (std::size_t i = 0; i < context.size(); ++i) {
        if (!resolve_index(alphabet_, context[i], &ctx[i], nullptr)) return 0;
    }
    if (!resolve_index(alphabet_, next, &nxt, nullptr)) return 0;
    auto it = contexts_.find(context_key(ctx));
    if (it == contexts_.end()) return 0;
    auto cit = it->second.by_symbol.find(static_cast<std::uint32_t>(nxt));
    return cit == it->second.by_symbol.end() ? 0 : cit->second;
}

double ContextModel::probability(const std::u32string& context, char32_t next) const {
    if (context.size() != static_cast<std::size_t>(order_)) {
        throw ConfigError("context length must equal the model order");
    }
    std::uint64_t ctx[2] = {0, 0};
    std::uint64_t nxt = 0;
    for (std::size_t i = 0; i < context.size(); ++i) {
        if (!resolve_index(alphabet_, context[i], &ctx[i], nullptr)) {
            return 1.0 / static_cast<double>(alphabet_.size());
        }
    }
    if (!resolve_index(alphabet_, next, &nxt, nullptr)) {
        return 1.0 / static_cast<double>(alphabet_.size());
    }
    return probability_by_index(ctx, nxt);
}

double shannon_entropy(const std::u32string& text) {
    if (text.empty()) {
        throw DataError("cannot compute entropy of an empty text");
    }
    std::unordered_map<char32_t, std::uint64_t> counts;
    for (char32_t c : text) ++counts[c];
    const double n = static_cast<double>(text.size());
    double h = 0.0;
    for (const auto& [sym, count] : counts) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h;
}

ContextModel fit_reference(const std::vector<std::u32string>& texts, int order,
                           double alpha, Alphabet alphabet,
                           std::size_t* texts_skipped) {
    check_order(order);
    check_alpha(alpha);
    if (texts.empty()) {
        throw DataError("cannot fit a reference model on zero texts");
    }
    ContextModel model(order, alpha, std::move(alphabet));
    std::size_t skipped = 0;
    const std::size_t k = static_cast<std::size_t>(order);
    for (const auto& text : texts) {
        if (text.size() < k + 1) {
            ++skipped;
            continue;
        }
        // Index the whole text once; positions unknown under clamp are
        // marked and any window touching one is dropped.
        std::vector<std::uint64_t> idx(text.size());
        std::vector<char> ok(text.size(), 1);
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (!resolve_index(model.alphabet_, text[i], &idx[i], nullptr)) ok[i] = 0;
        }
        for (std::size_t i = k; i < text.size(); ++i) {
            bool usable = ok[i];
            for (std::size_t j = i - k; j < i; ++j) usable = usable && ok[j];
            if (!usable) continue;
            model.add_observation(&idx[i - k], static_cast<std::size_t>(idx[i]));
        }
    }
    if (texts_skipped) *texts_skipped = skipped;
    model.frozen_ = true;
    return model;
}

CodeLength cross_code_length(const ContextModel& model, const std::u32string& target) {
    const std::size_t k = static_cast<std::size_t>(model.order());
    if (target.size() <= k) {
        throw DataError("target must be longer than the model order");
    }
    const Alphabet& a = model.alphabet();
    std::vector<std::uint64_t> idx(target.size());
    std::vector<char> ok(target.size(), 1);
    std::vector<char> oov(target.size(), 0);
    for (std::size_t i = 0; i < target.size(); ++i) {
        bool was_oov = false;
        if (!resolve_index(a, target[i], &idx[i], &was_oov)) ok[i] = 0;
        if (was_oov) oov[i] = 1;
    }
    CodeLength out;
    for (std::size_t i = k; i < target.size(); ++i) {
        bool usable = ok[i];
        for (std::size_t j = i - k; j < i; ++j) usable = usable && ok[j];
        if (!usable) {
            ++out.oov_skipped;
            continue;
        }
        double bits = -std::log2(model.probability_by_index(&idx[i - k],
                                                            static_cast<std::size_t>(idx[i])));
        if (oov[i]) bits += kLiteralBits;
        out.total_bits += bits;
        ++out.chars_scored;
    }
    if (out.chars_scored > 0) {
        out.per_char_bits = out.total_bits / static_cast<double>(out.chars_scored);
    }
    return out;
}

double nrc(const ContextModel& model, const std::u32string& target) {
    if (model.alphabet().size() < 2) {
        throw DataError("NRC needs an alphabet of at least two symbols");
    }
    CodeLength code = cross_code_length(model, target);
    if (code.chars_scored == 0) return 0.0;
    const double denom = static_cast<double>(code.chars_scored) *
                         std::log2(static_cast<double>(model.alphabet().size()));
    return code.total_bits / denom;
}

double markov_entropy(const ContextModel& model, const std::u32string& target) {
    return cross_code_length(model, target).per_char_bits;
}

double entropy_ratio(const ContextModel& model, const std::u32string& target) {
    const double h_markov = markov_entropy(model, target);
    const double h_shannon = shannon_entropy(target);
    if (h_shannon < 1e-12) return 1.0;
    return h_markov / h_shannon;
}

CodeLength adaptive_code_length(const std::u32string& text, int order, double alpha) {
    check_order(order);
    check_alpha(alpha);
    const std::size_t k = static_cast<std::size_t>(order);
    if (text.size() <= k) {
        throw DataError("text must be longer than the coder order");
    }
    Alphabet a = Alphabet::build({text}, OovPolicy::clamp);
    ContextModel model(order, alpha, a);
    std::vector<std::uint64_t> idx(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        idx[i] = static_cast<std::uint64_t>(a.index_of(text[i]));
    }
    CodeLength out;
    for (std::size_t i = k; i < text.size(); ++i) {
        const double p = model.probability_by_index(&idx[i - k],
                                                    static_cast<std::size_t>(idx[i]));
        out.total_bits += -std::log2(p);
        model.add_observation(&idx[i - k], static_cast<std::size_t>(idx[i]));
        ++out.chars_scored;
    }
    // A one-symbol alphabet prices every position at exactly p = 1.
    if (out.total_bits < 0.0) out.total_bits = 0.0;
    if (out.chars_scored > 0) {
        out.per_char_bits = out.total_bits / static_cast<double>(out.chars_scored);
    }
    return out;
}

double compression_ratio(const std::u32string& text, int order, double alpha) {
    CodeLength code = adaptive_code_length(text, order, alpha);
    if (code.chars_scored == 0) return 0.0;
    return code.total_bits / (static_cast<double>(code.chars_scored) * 8.0);
}

namespace {

std::string symbols_to_utf8(const std::vector<char32_t>& symbols) {
    std::string out;
    for (char32_t c : symbols) text::append_utf8(out, c);
    return out;
}

char32_t index_to_codepoint(const Alphabet& a, std::size_t idx) {
    if (a.has_escape() && idx == a.escape_index()) return kEscapeCodepoint;
    return a.symbols()[idx];
}

std::uint64_t codepoint_to_index(const Alphabet& a, char32_t cp) {
    if (cp == kEscapeCodepoint) {
        if (!a.has_escape()) throw ModelError("escape symbol present without escape policy");
        return a.escape_index();
    }
    std::ptrdiff_t idx = a.index_of(cp);
    if (idx < 0) throw ModelError("context symbol outside the stored alphabet");
    return static_cast<std::uint64_t>(idx);
}

}  // namespace

std::string to_json(const ContextModel& model) {
    nlohmann::json j;
    j["version"] = "tempora.markov/1";
    j["order"] = model.order();
    j["alpha"] = model.alpha();
    j["policy"] = to_string(model.alphabet().policy());
    j["has_escape"] = model.alphabet().has_escape();
    nlohmann::json alpha_arr = nlohmann::json::array();
    for (char32_t c : model.alphabet().symbols()) {
        alpha_arr.push_back(static_cast<std::uint32_t>(c));
    }
    j["alphabet"] = std::move(alpha_arr);

    const Alphabet& a = model.alphabet();
    const std::size_t size = a.size();
    nlohmann::json contexts = nlohmann::json::object();
    for (const auto& [key, slot] : model.contexts()) {
        std::vector<char32_t> ctx;
        if (model.order() == 1) {
            ctx.push_back(index_to_codepoint(a, key));
        } else {
            ctx.push_back(index_to_codepoint(a, key / size));
            ctx.push_back(index_to_codepoint(a, key % size));
        }
        nlohmann::json entry = nlohmann::json::object();
        for (const auto& [sym, count] : slot.by_symbol) {
            std::string sym_key;
            text::append_utf8(sym_key, index_to_codepoint(a, sym));
            entry[sym_key] = count;
        }
        contexts[symbols_to_utf8(ctx)] = std::move(entry);
    }
    j["contexts"] = std::move(contexts);
    return j.dump(2) + "\n";
}

ContextModel model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed model JSON: ") + e.what());
    }
    try {
        if (j.at("version").get<std::string>() != "tempora.markov/1") {
            throw ModelError("unsupported model version `" +
                             j.at("version").get<std::string>() + "`");
        }
        const int order = j.at("order").get<int>();
        const double alpha = j.at("alpha").get<double>();
        const std::string policy_str = j.at("policy").get<std::string>();
        OovPolicy policy;
        if (policy_str == "escape_symbol") {
            policy = OovPolicy::escape_symbol;
        } else if (policy_str == "clamp") {
            policy = OovPolicy::clamp;
        } else {
            throw ModelError("unknown OOV policy `" + policy_str + "`");
        }
        const bool has_escape = j.at("has_escape").get<bool>();
        std::vector<char32_t> symbols;
        for (const auto& v : j.at("alphabet")) {
            symbols.push_back(static_cast<char32_t>(v.get<std::uint32_t>()));
        }
        Alphabet a = Alphabet::from_symbols(std::move(symbols), policy, has_escape);
        ContextModel model(order, alpha, a);
        for (const auto& [ctx_str, entry] : j.at("contexts").items()) {
            auto decoded = text::decode_utf8(ctx_str);
            if (decoded.text.size() != static_cast<std::size_t>(order)) {
                throw ModelError("context key length does not match the model order");
            }
            std::uint64_t ctx[2] = {0, 0};
            for (std::size_t i = 0; i < decoded.text.size(); ++i) {
                ctx[i] = codepoint_to_index(a, decoded.text[i]);
            }
            for (const auto& [sym_str, count] : entry.items()) {
                auto sym_decoded = text::decode_utf8(sym_str);
                if (sym_decoded.text.size() != 1) {
                    throw ModelError("symbol key must be a single scalar value");
                }
                const std::uint64_t n = count.get<std::uint64_t>();
                if (n == 0) continue;
                model.add_observation(ctx, static_cast<std::size_t>(codepoint_to_index(
                                               a, sym_decoded.text[0])),
                                      n);
            }
        }
        model.frozen_ = true;
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("invalid model JSON: ") + e.what());
    }
}

void save_model(const ContextModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path.string());
    out << to_json(model);
    if (!out) throw DataError("failed writing model file: " + path.string());
}

ContextModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace tempora::markov
