#include "lmrec/sexpr.hpp"

#include "lmrec/errors.hpp"

#include <cctype>

namespace lmrec {

namespace {

class Reader {
public:
    explicit Reader(const std::string &text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    Sexpr read() {
        skip_ws();
        if (pos_ >= text_.size())
            throw ParseError("unexpected end of input", line_, col_);
        char c = text_[pos_];
        if (c == '(') {
            Sexpr list;
            list.kind = Sexpr::Kind::List;
            list.line = line_;
            list.column = col_;
            advance();
            for (;;) {
                skip_ws();
                if (pos_ >= text_.size())
                    throw ParseError("missing ')'", list.line, list.column);
                if (text_[pos_] == ')') {
                    advance();
                    return list;
                }
                list.items.push_back(read());
            }
        }
        if (c == ')')
            throw ParseError("unexpected ')'", line_, col_);
        Sexpr sym;
        sym.kind = Sexpr::Kind::Symbol;
        sym.line = line_;
        sym.column = col_;
        while (pos_ < text_.size()) {
            c = text_[pos_];
            if (c == '(' || c == ')' || c == ';' ||
                std::isspace(static_cast<unsigned char>(c)))
                break;
            sym.symbol.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            advance();
        }
        return sym;
    }

    int line() const { return line_; }
    int col() const { return col_; }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string &text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace

Sexpr read_sexpr(const std::string &text) {
    Reader r(text);
    Sexpr e = r.read();
    if (!r.at_end())
        throw ParseError("trailing content after expression", r.line(), r.col());
    return e;
}

std::vector<Sexpr> read_sexprs(const std::string &text) {
    Reader r(text);
    std::vector<Sexpr> out;
    while (!r.at_end()) out.push_back(r.read());
    return out;
}

} // namespace lmrec
