#include "acorn/parse.hpp"

#include <cctype>
#include <set>

namespace acorn {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line),
      column_(column)
{}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, Number, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t begin = 0;
    std::size_t end = 0;
};

const std::set<std::string_view> keywords = {"let",  "in",   "fix",  "case", "return", "of",     "if",   "then",
                                             "else", "forall", "data", "record", "type", "def", "test"};

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "--") {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        t.begin = i;
        std::size_t n = 0;
        if (ident_start(c)) {
            t.kind = Tok::Ident;
            while (i + n < src.size() && ident_char(src[i + n]))
                ++n;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            t.kind = Tok::Number;
            n = 1;
            while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n])))
                ++n;
            if (i + n < src.size() && src[i + n] == 'z')
                ++n;
        } else {
            t.kind = Tok::Sym;
            static const char* multi[] = {"/\\", "->"};
            n = 1;
            for (const char* m : multi)
                if (src.substr(i, 2) == m)
                    n = 2;
            if (n == 1 && std::string_view("\\()[]{},;:|=@^#.").find(c) == std::string_view::npos)
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = std::string(src.substr(i, n));
        advance(n);
        t.end = i;
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    end.begin = end.end = i;
    out.push_back(end);
    return out;
}

// ---------------------------------------------------------------------------
// Parser

struct DataItem {
    Ident name;
    // Either named parameters or a bare count.
    std::vector<Ident> params;
    std::size_t count = 0;
    std::vector<std::pair<Ident, std::vector<Ty>>> ctors;
};

struct RecordItem {
    Ident name;
    Ident ctor;
    std::vector<std::pair<Ident, Ty>> fields;
};

struct DefItem {
    Ident name;
    Expr body;
    bool is_test = false;
};

class Parser {
public:
    Parser(std::string_view src, const Module& scope) : toks_(lex(src)), scope_(scope)
    {
        for (const auto& ind : scope.env.inductives())
            types_.insert(ind.name);
        types_.insert("Int");
        types_.insert("Nat");
        aliases_ = scope.aliases;
        // Types may be used before their declaration.
        for (std::size_t i = 0; i + 1 < toks_.size(); ++i)
            if (toks_[i].kind == Tok::Ident && (toks_[i].text == "data" || toks_[i].text == "record") &&
                toks_[i + 1].kind == Tok::Ident)
                types_.insert(toks_[i + 1].text);
    }

    Module module()
    {
        Module m = scope_;
        // Only the environment and aliases carry over; the name lists describe
        // this module alone.
        m.inductive_names.clear();
        m.definitions.clear();
        m.programs.clear();
        std::vector<DefItem> defs;
        while (!at_end()) {
            if (accept_kw("data")) {
                add_data(m, data());
            } else if (accept_kw("record")) {
                add_record(m, record(), defs);
            } else if (accept_kw("type")) {
                auto name = ident();
                expect("=");
                auto t = type();
                if (!ty_closed_under(0, t))
                    fail("type alias '" + name + "' must be closed");
                aliases_.insert_or_assign(name, t);
                m.aliases.insert_or_assign(name, t);
            } else if (accept_kw("def")) {
                defs.push_back(definition(false));
            } else if (accept_kw("test")) {
                defs.push_back(definition(true));
            } else {
                fail("expected 'data', 'record', 'type', 'def' or 'test'");
            }
        }
        elaborate(m, defs);
        return m;
    }

    Expr closed_expr()
    {
        auto e = expr();
        if (!at_end())
            fail("unexpected '" + peek().text + "' after expression");
        return indexify(scope_.env, {}, e);
    }

    Ty closed_type()
    {
        auto t = type();
        if (!at_end())
            fail("unexpected '" + peek().text + "' after type");
        return indexify(NamingContext{}, t);
    }

private:
    // -- token helpers ------------------------------------------------------

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Tok::End; }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError(msg, peek().line, peek().column);
    }

    bool is_sym(std::string_view s, std::size_t k = 0) const
    {
        return peek(k).kind == Tok::Sym && peek(k).text == s;
    }
    bool is_kw(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }

    bool accept(std::string_view s)
    {
        if (!is_sym(s))
            return false;
        ++pos_;
        return true;
    }
    bool accept_kw(std::string_view s)
    {
        if (!is_kw(s))
            return false;
        ++pos_;
        return true;
    }
    void expect(std::string_view s)
    {
        if (!accept(s))
            fail("expected '" + std::string(s) + "'" + (at_end() ? "" : " before '" + peek().text + "'"));
    }
    void expect_kw(std::string_view s)
    {
        if (!accept_kw(s))
            fail("expected '" + std::string(s) + "'");
    }

    bool is_ident() const { return peek().kind == Tok::Ident && !keywords.count(peek().text); }

    Ident ident()
    {
        if (!is_ident())
            fail(at_end() ? "unexpected end of input" : "expected an identifier, found '" + peek().text + "'");
        return toks_[pos_++].text;
    }

    std::size_t natural()
    {
        if (peek().kind != Tok::Number || peek().text.back() == 'z' || peek().text.front() == '-')
            fail("expected a natural number");
        return std::stoul(toks_[pos_++].text);
    }

    // -- types --------------------------------------------------------------

    Ty type()
    {
        if (accept_kw("forall")) {
            std::vector<Ident> names;
            while (!is_sym("."))
                names.push_back(ident());
            if (names.empty())
                fail("forall needs at least one binder");
            expect(".");
            auto body = type();
            for (auto it = names.rbegin(); it != names.rend(); ++it)
                body = Ty::forall(*it, std::move(body));
            return body;
        }
        auto t = type_app();
        if (accept("->"))
            return Ty::arr(std::move(t), type());
        return t;
    }

    bool type_atom_start() const { return is_ident() || is_sym("^") || is_sym("("); }

    Ty type_app()
    {
        auto t = type_atom();
        while (type_atom_start())
            t = Ty::app(std::move(t), type_atom());
        return t;
    }

    Ty type_atom()
    {
        if (accept("^"))
            return Ty::var(natural());
        if (accept("(")) {
            auto t = type();
            expect(")");
            return t;
        }
        auto name = ident();
        if (auto it = aliases_.find(name); it != aliases_.end())
            return it->second;
        if (types_.count(name))
            return Ty::ind(name);
        return Ty::named_var(name);
    }

    // -- expressions --------------------------------------------------------

    Expr expr()
    {
        if (accept("\\"))
            return lambda();
        if (accept("/\\")) {
            std::vector<Ident> names;
            while (!is_sym("->"))
                names.push_back(ident());
            if (names.empty())
                fail("type abstraction needs at least one binder");
            expect("->");
            auto body = expr();
            for (auto it = names.rbegin(); it != names.rend(); ++it)
                body = Expr::ty_lam(*it, std::move(body));
            return body;
        }
        if (accept_kw("let")) {
            auto name = ident();
            expect(":");
            auto t = type();
            expect("=");
            auto bound = expr();
            expect_kw("in");
            return Expr::let_in(name, std::move(t), std::move(bound), expr());
        }
        if (accept_kw("fix")) {
            auto f = ident();
            expect("(");
            auto x = ident();
            expect(":");
            auto dom = type();
            expect(")");
            expect(":");
            auto cod = type();
            expect("=");
            return Expr::fix(f, x, std::move(dom), std::move(cod), expr());
        }
        if (accept_kw("case"))
            return case_expr();
        if (accept_kw("if")) {
            auto c = expr();
            expect_kw("return");
            auto t = type();
            expect_kw("then");
            auto a = expr();
            expect_kw("else");
            auto b = expr();
            std::vector<Expr::Branch> branches{{{"True", {}}, std::move(a)}, {{"False", {}}, std::move(b)}};
            return Expr::case_of(std::move(c), "Bool", {}, std::move(t), std::move(branches));
        }
        return application();
    }

    Expr lambda()
    {
        std::vector<std::pair<Ident, Ty>> binders;
        if (is_sym("(")) {
            while (accept("(")) {
                auto x = ident();
                expect(":");
                auto t = type();
                expect(")");
                binders.emplace_back(x, t);
            }
        } else {
            auto x = ident();
            expect(":");
            binders.emplace_back(x, type_app());
        }
        expect("->");
        auto body = expr();
        for (auto it = binders.rbegin(); it != binders.rend(); ++it)
            body = Expr::lam(it->first, it->second, std::move(body));
        return body;
    }

    Expr case_expr()
    {
        auto scrut = expr();
        expect(":");
        auto head = type_app();
        std::vector<Ty> params;
        while (const auto* app = head.as<ty::App>()) {
            params.insert(params.begin(), app->arg);
            head = app->fn;
        }
        const auto* ind = head.as<ty::Ind>();
        if (!ind)
            fail("case needs an inductive type after ':'");
        expect_kw("return");
        auto ret = type();
        expect_kw("of");
        std::vector<Expr::Branch> branches;
        while (accept("|")) {
            Pat pat{ident(), {}};
            while (!is_sym("->"))
                pat.binders.push_back(ident());
            expect("->");
            branches.push_back({std::move(pat), expr()});
        }
        if (branches.empty())
            fail("case needs at least one branch");
        return Expr::case_of(std::move(scrut), ind->name, std::move(params), std::move(ret), std::move(branches));
    }

    bool atom_start() const
    {
        return is_ident() || peek().kind == Tok::Number || is_sym("(") || is_sym("@") || is_sym("#");
    }

    Expr application()
    {
        if (!atom_start())
            fail(at_end() ? "unexpected end of input" : "expected an expression, found '" + peek().text + "'");
        auto e = atom();
        while (atom_start())
            e = Expr::app(std::move(e), atom());
        return e;
    }

    Expr atom()
    {
        if (accept("(")) {
            auto e = expr();
            expect(")");
            return e;
        }
        if (accept("@"))
            return Expr::ty_expr(type_atom());
        // Raw de Bruijn index.
        if (accept("#"))
            return Expr::var(natural());
        if (peek().kind == Tok::Number) {
            auto text = toks_[pos_++].text;
            if (text.back() == 'z')
                return Expr::lit(PrimVal::integer(Integer(text.substr(0, text.size() - 1))));
            if (text.front() == '-')
                fail("negative literal '" + text + "' must be an Int (suffix z)");
            return Expr::lit(PrimVal::natural(Integer(text)));
        }
        const Token& first = peek();
        auto name = ident();
        // Qualified constructor `I.C`, written without spaces.
        if (is_sym(".") && peek().begin == first.end && peek(1).kind == Tok::Ident && peek(1).begin == peek().end) {
            ++pos_;
            return Expr::constr(name, ident());
        }
        return Expr::named_var(name);
    }

    // -- declarations -------------------------------------------------------

    DataItem data()
    {
        DataItem d;
        d.name = ident();
        if (accept("#"))
            d.count = natural();
        else
            while (is_ident())
                d.params.push_back(ident());
        if (!d.params.empty())
            d.count = d.params.size();
        expect("=");
        accept("|");
        do {
            std::pair<Ident, std::vector<Ty>> ctor{ident(), {}};
            if (accept("[")) {
                if (!is_sym("]")) {
                    do
                        ctor.second.push_back(type());
                    while (accept(","));
                }
                expect("]");
            }
            d.ctors.push_back(std::move(ctor));
        } while (accept("|"));
        return d;
    }

    void add_data(Module& m, const DataItem& d)
    {
        InductiveDecl decl{d.name, d.count, {}};
        NamingContext ctx;
        for (const auto& p : d.params)
            ctx.push_back({p, BinderKind::Type});
        for (const auto& [name, args] : d.ctors) {
            ConstrDecl c{name, {}};
            for (const auto& a : args)
                c.args.push_back(indexify(ctx, a));
            decl.constrs.push_back(std::move(c));
        }
        declare(m, std::move(decl));
    }

    RecordItem record()
    {
        RecordItem r;
        r.name = ident();
        expect("=");
        r.ctor = ident();
        expect("{");
        while (!accept("}")) {
            auto field = ident();
            expect(":");
            r.fields.emplace_back(field, type());
            if (!accept(";") && !is_sym("}"))
                fail("expected ';' or '}' in record");
        }
        return r;
    }

    void add_record(Module& m, const RecordItem& r, std::vector<DefItem>& defs)
    {
        ConstrDecl c{r.ctor, {}};
        for (const auto& [_, t] : r.fields) {
            if (!ty_closed_under(0, t))
                fail("record field types must be closed");
            c.args.push_back(t);
        }
        declare(m, InductiveDecl{r.name, 0, {c}});
        Pat pat{r.ctor, {}};
        for (const auto& f : r.fields)
            pat.binders.push_back(f.first);
        for (const auto& [field, t] : r.fields) {
            auto body = Expr::case_of(Expr::named_var("r"), r.name, {}, t, {{pat, Expr::named_var(field)}});
            defs.push_back({field, Expr::lam("r", Ty::ind(r.name), body), false});
        }
    }

    void declare(Module& m, InductiveDecl decl)
    {
        if (m.env.find_inductive(decl.name))
            fail("duplicate inductive '" + decl.name + "'");
        m.inductive_names.push_back(decl.name);
        m.env.add_inductive(std::move(decl));
    }

    DefItem definition(bool is_test)
    {
        DefItem d{ident(), Expr::named_var("_"), is_test};
        std::vector<std::pair<Ident, Ty>> binders;
        while (accept("(")) {
            auto x = ident();
            expect(":");
            auto t = type();
            expect(")");
            binders.emplace_back(x, t);
        }
        expect("=");
        d.body = expr();
        for (auto it = binders.rbegin(); it != binders.rend(); ++it)
            d.body = Expr::lam(it->first, it->second, std::move(d.body));
        return d;
    }

    void elaborate(Module& m, const std::vector<DefItem>& defs)
    {
        // Register every definition first so bodies may refer to each other by
        // name; the placeholder bodies are replaced below.
        GlobalEnv scope = m.env;
        std::set<Ident> seen;
        for (const auto& d : defs) {
            if (d.is_test)
                continue;
            if (scope.find_constant(d.name))
                throw ParseError("duplicate definition '" + d.name + "'", peek().line, peek().column);
            scope.define(d.name, d.body);
        }
        for (const auto& d : defs) {
            if (d.is_test)
                continue;
            Expr body = indexify_in(scope, d);
            m.env.define(d.name, body);
            m.definitions.push_back(d.name);
        }
        for (const auto& d : defs) {
            if (!d.is_test)
                continue;
            if (!seen.insert(d.name).second)
                throw ParseError("duplicate test '" + d.name + "'", peek().line, peek().column);
            m.programs.emplace_back(d.name, indexify_in(m.env, d));
        }
    }

    static Expr indexify_in(const GlobalEnv& env, const DefItem& d)
    {
        try {
            return indexify(env, {}, d.body);
        } catch (const UnboundName& e) {
            // Keep the inner detail, drop the repeated "unbound name 'x'".
            std::string detail = e.what();
            const std::string head = "unbound name '" + e.name() + "'";
            detail = detail.size() > head.size() ? detail.substr(head.size() + 2) + ", " : "";
            throw UnboundName(e.name(), detail + "in " + d.name);
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Module& scope_;
    std::set<Ident, std::less<>> types_;
    std::map<Ident, Ty, std::less<>> aliases_;
};

}  // namespace

Module empty_module()
{
    Module m;
    m.env.add_primitives();
    return m;
}

Module parse_module(std::string_view source, const Module& base)
{
    return Parser(source, base).module();
}

Expr parse_expr(std::string_view source, const Module& scope)
{
    return Parser(source, scope).closed_expr();
}

Ty parse_type(std::string_view source, const Module& scope)
{
    return Parser(source, scope).closed_type();
}

}  // namespace acorn
