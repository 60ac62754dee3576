#include <cstdint>
#include <fstream>
#include <sstream>

#include "mfs/census.hpp"
#include "mfs/errors.hpp"

namespace mfs {

namespace {

constexpr char kMagic[4] = {'M', 'F', 'S', 'C'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}
    template <class T>
    void pod(const T& v) { os_.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void str(const std::string& s) {
        pod(static_cast<std::uint64_t>(s.size()));
        os_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void integer(const Integer& z) { str(z.get_str(16)); }
    void rational(const Rational& q) { str(q.get_str(16)); }

private:
    std::ostream& os_;
};

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}
    template <class T>
    T pod() {
        T v{};
        is_.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!is_) throw ParseError("census snapshot is truncated");
        return v;
    }
    std::string str() {
        const auto n = pod<std::uint64_t>();
        if (n > (1ull << 32)) throw ParseError("census snapshot has a corrupt length field");
        std::string s(n, '\0');
        is_.read(s.data(), static_cast<std::streamsize>(n));
        if (!is_) throw ParseError("census snapshot is truncated");
        return s;
    }
    Integer integer() { return Integer(str(), 16); }
    Rational rational() {
        Rational q(str(), 16);
        q.canonicalize();
        return q;
    }

private:
    std::istream& is_;
};

// Identifies the system a snapshot belongs to.
std::string signature(const WeightedIFS& ifs, const ExpansionData& x) {
    std::ostringstream os;
    for (const auto& z : x.field->minimal_polynomial_integers()) os << z.get_str() << ',';
    os << '|' << x.field->root_index() << '|';
    for (const auto& q : ifs.algebraic->beta.coeffs()) os << to_string(q) << ',';
    for (const auto& m : ifs.maps) {
        os << '|';
        for (const auto& q : (*m.translation_exact)[0].coeffs()) os << to_string(q) << ',';
    }
    os << '|';
    for (const auto& p : x.p) os << to_string(p) << ',';
    return os.str();
}

}  // namespace

void OverlapCensus::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write census snapshot " + path);
    os.write(kMagic, 4);
    Writer w(os);
    w.pod(kVersion);
    w.str(signature(ifs_, data_));
    w.pod(static_cast<std::uint32_t>(levels_.size()));
    for (const auto& lv : levels_) {
        w.pod(static_cast<std::int32_t>(lv.n));
        w.integer(lv.denom);
        w.pod(static_cast<std::uint64_t>(lv.classes.size()));
        for (const auto& c : lv.classes) {
            w.pod(static_cast<std::uint32_t>(c.v.size()));
            for (const auto& z : c.v) w.integer(z);
            w.rational(c.mass);
            w.integer(c.words);
            w.str(std::string(c.rep.begin(), c.rep.end()));
            w.pod(static_cast<std::uint32_t>(c.emb.size()));
            for (const auto& z : c.emb) {
                w.pod(z.real());
                w.pod(z.imag());
            }
        }
    }
    if (!os) throw Error("failed writing census snapshot " + path);
}

OverlapCensus OverlapCensus::load(const std::string& path, const WeightedIFS& ifs) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open census snapshot " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4)) throw ParseError(path + " is not a census snapshot");
    Reader r(is);
    const auto version = r.pod<std::uint32_t>();
    if (version != kVersion) throw ParseError("unsupported census snapshot version " + std::to_string(version));
    OverlapCensus c;
    c.ifs_ = ifs;
    c.data_ = make_expansion_data(ifs);
    c.log_beta_ = std::log(std::abs(c.data_.beta_conj[0]));
    if (r.str() != signature(ifs, c.data_)) throw ParseError("census snapshot was written for a different system");
    const auto depth = r.pod<std::uint32_t>();
    for (std::uint32_t k = 0; k < depth; ++k) {
        CensusLevel lv;
        lv.n = r.pod<std::int32_t>();
        if (lv.n != static_cast<int>(k) + 1) throw ParseError("census snapshot levels out of order");
        lv.denom = r.integer();
        const auto count = r.pod<std::uint64_t>();
        lv.classes.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            CensusClass cl;
            const auto d = r.pod<std::uint32_t>();
            for (std::uint32_t j = 0; j < d; ++j) cl.v.push_back(r.integer());
            cl.key = census_key(cl.v);
            cl.mass = r.rational();
            cl.words = r.integer();
            const std::string rep = r.str();
            cl.rep.assign(rep.begin(), rep.end());
            const auto e = r.pod<std::uint32_t>();
            for (std::uint32_t j = 0; j < e; ++j) {
                const double re = r.pod<double>();
                const double im = r.pod<double>();
                cl.emb.emplace_back(re, im);
            }
            lv.classes.push_back(std::move(cl));
        }
        c.levels_.push_back(std::move(lv));
    }
    return c;
}

}  // namespace mfs
