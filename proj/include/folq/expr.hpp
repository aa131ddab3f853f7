// SPDX-License-Identifier: MIT
//
// A minimal scalar-field expression language over foliated chart variables.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('-' | '+') factor | power
//   power  := atom ('^' integer)?            (chained '^' requires parens)
//   atom   := number | variable | fn '(' expr ')' | '(' expr ')'
//   fn     := sin | cos | exp
//
// Variables are x1..xp (tangential) and y1..yq (transverse), mapping to point
// slots 0..p-1 and p..p+q-1.  Evaluation is generic over the scalar ring, so
// the same tree evaluates on plain doubles and on truncated jets.

#pragma once

#include <folq/errors.hpp>
#include <folq/linalg.hpp>  // std_part for the division guard

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace folq {

struct ParseError : std::runtime_error {
    ParseError(std::size_t off, const std::string& msg)
        : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"),
          offset(off) {}
    std::size_t offset;
};

namespace detail {

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp };
    Op op;
    double value = 0.0;  // Const
    int var = -1;        // Var: 0-based point slot
    int ipow = 0;        // Pow exponent
    NodePtr a, b;
};

}  // namespace detail

/// An immutable expression tree plus the chart block sizes it was written for.
struct Expression {
    detail::NodePtr root;
    int p = 0, q = 0;
};

// ---------------------------------------------------------------------------
// builders (used by generated test data and by the config reader)
// ---------------------------------------------------------------------------

namespace detail {
inline NodePtr node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }
}  // namespace detail

inline Expression expr_const(double v, int p, int q) {
    using detail::ExprNode;
    return {detail::node({ExprNode::Op::Const, v}), p, q};
}
inline Expression expr_var(int slot, int p, int q) {
    using detail::ExprNode;
    ExprNode n{ExprNode::Op::Var};
    n.var = slot;
    return {detail::node(std::move(n)), p, q};
}
namespace detail {
inline Expression binary(ExprNode::Op op, const Expression& a, const Expression& b) {
    ExprNode n{op};
    n.a = a.root;
    n.b = b.root;
    return {node(std::move(n)), a.p, a.q};
}
}  // namespace detail
inline Expression expr_add(const Expression& a, const Expression& b) {
    return detail::binary(detail::ExprNode::Op::Add, a, b);
}
inline Expression expr_sub(const Expression& a, const Expression& b) {
    return detail::binary(detail::ExprNode::Op::Sub, a, b);
}
inline Expression expr_mul(const Expression& a, const Expression& b) {
    return detail::binary(detail::ExprNode::Op::Mul, a, b);
}
inline Expression expr_div(const Expression& a, const Expression& b) {
    return detail::binary(detail::ExprNode::Op::Div, a, b);
}
inline Expression expr_neg(const Expression& a) {
    detail::ExprNode n{detail::ExprNode::Op::Neg};
    n.a = a.root;
    return {detail::node(std::move(n)), a.p, a.q};
}
inline Expression expr_pow(const Expression& a, int k) {
    detail::ExprNode n{detail::ExprNode::Op::Pow};
    n.a = a.root;
    n.ipow = k;
    return {detail::node(std::move(n)), a.p, a.q};
}
inline Expression expr_sin(const Expression& a) {
    detail::ExprNode n{detail::ExprNode::Op::Sin};
    n.a = a.root;
    return {detail::node(std::move(n)), a.p, a.q};
}
inline Expression expr_cos(const Expression& a) {
    detail::ExprNode n{detail::ExprNode::Op::Cos};
    n.a = a.root;
    return {detail::node(std::move(n)), a.p, a.q};
}
inline Expression expr_exp(const Expression& a) {
    detail::ExprNode n{detail::ExprNode::Op::Exp};
    n.a = a.root;
    return {detail::node(std::move(n)), a.p, a.q};
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
  public:
    Parser(std::string_view text, int p, int q) : text_(text), p_(p), q_(q) {}

    NodePtr run() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError(pos_, "empty expression");
        NodePtr e = expr();
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError(pos_, "unexpected trailing input");
        return e;
    }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int p_, q_;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (true) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            ExprNode n{c == '+' ? ExprNode::Op::Add : ExprNode::Op::Sub};
            n.a = lhs;
            n.b = term();
            lhs = node(std::move(n));
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (true) {
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            ExprNode n{c == '*' ? ExprNode::Op::Mul : ExprNode::Op::Div};
            n.a = lhs;
            n.b = factor();
            lhs = node(std::move(n));
        }
    }

    NodePtr factor() {
        char c = peek();
        if (c == '-') {
            ++pos_;
            ExprNode n{ExprNode::Op::Neg};
            n.a = factor();
            return node(std::move(n));
        }
        if (c == '+') {
            ++pos_;
            return factor();
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (peek() != '^') return base;
        std::size_t caret = pos_;
        ++pos_;
        skip_ws();
        bool parens = false;
        if (pos_ < text_.size() && text_[pos_] == '(') { parens = true; ++pos_; skip_ws(); }
        std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw ParseError(caret + 1, "exponent must be a non-negative integer");
        int k = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + text_.size(), k);
        if (ec != std::errc())
            throw ParseError(start, "bad integer exponent");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        if (parens) {
            if (peek() != ')') throw ParseError(pos_, "expected ')' after exponent");
            ++pos_;
        }
        if (peek() == '^')
            throw ParseError(pos_, "chained '^' is ambiguous, parenthesize");
        ExprNode n{ExprNode::Op::Pow};
        n.a = base;
        n.ipow = k;
        return node(std::move(n));
    }

    NodePtr atom() {
        char c = peek();
        std::size_t start = pos_;
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (peek() != ')') throw ParseError(pos_, "expected ')'");
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
            if (ec != std::errc()) throw ParseError(pos_, "bad number literal");
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            ExprNode n{ExprNode::Op::Const, v};
            return node(std::move(n));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            std::string_view name = text_.substr(pos_, end - pos_);
            pos_ = end;
            if (name == "sin" || name == "cos" || name == "exp") {
                if (peek() != '(') throw ParseError(pos_, "expected '(' after function name");
                ++pos_;
                NodePtr arg = expr();
                if (peek() != ')') throw ParseError(pos_, "expected ')'");
                ++pos_;
                ExprNode n{name == "sin"   ? ExprNode::Op::Sin
                           : name == "cos" ? ExprNode::Op::Cos
                                           : ExprNode::Op::Exp};
                n.a = arg;
                return node(std::move(n));
            }
            return variable(name, start);
        }
        throw ParseError(pos_, "expected a number, variable or '('");
    }

    NodePtr variable(std::string_view name, std::size_t at) {
        if (name.size() < 2 || (name[0] != 'x' && name[0] != 'y'))
            throw ParseError(at, "unknown identifier '" + std::string(name) + "'");
        int idx = 0;
        auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
        if (ec != std::errc() || ptr != name.data() + name.size())
            throw ParseError(at, "unknown identifier '" + std::string(name) + "'");
        const bool tangential = name[0] == 'x';
        const int block = tangential ? p_ : q_;
        if (idx < 1 || idx > block)
            throw ParseError(at, "variable '" + std::string(name) + "' out of range (p=" +
                                     std::to_string(p_) + ", q=" + std::to_string(q_) + ")");
        ExprNode n{ExprNode::Op::Var};
        n.var = tangential ? idx - 1 : p_ + idx - 1;
        return node(std::move(n));
    }
};

}  // namespace detail

inline Expression parse(std::string_view text, int p, int q) {
    return {detail::Parser(text, p, q).run(), p, q};
}

// ---------------------------------------------------------------------------
// evaluation (generic over the scalar ring)
// ---------------------------------------------------------------------------

namespace detail {

template <class R>
R eval_node(const ExprNode& n, std::span<const R> pt) {
    using std::cos;
    using std::exp;
    using std::sin;
    switch (n.op) {
        case ExprNode::Op::Const: return R(n.value);
        case ExprNode::Op::Var:   return pt[n.var];
        case ExprNode::Op::Add:   return eval_node(*n.a, pt) + eval_node(*n.b, pt);
        case ExprNode::Op::Sub:   return eval_node(*n.a, pt) - eval_node(*n.b, pt);
        case ExprNode::Op::Mul:   return eval_node(*n.a, pt) * eval_node(*n.b, pt);
        case ExprNode::Op::Div: {
            R den = eval_node(*n.b, pt);
            if (std_part(den) == 0.0)
                throw EvalError("division by zero standard part");
            return eval_node(*n.a, pt) / den;
        }
        case ExprNode::Op::Neg: return -eval_node(*n.a, pt);
        case ExprNode::Op::Pow: {
            R base = eval_node(*n.a, pt);
            R acc(1.0);
            for (int i = 0; i < n.ipow; ++i) acc = acc * base;
            return acc;
        }
        case ExprNode::Op::Sin: return sin(eval_node(*n.a, pt));
        case ExprNode::Op::Cos: return cos(eval_node(*n.a, pt));
        case ExprNode::Op::Exp: return exp(eval_node(*n.a, pt));
    }
    throw EvalError("corrupt expression node");
}

}  // namespace detail

template <class R>
R evaluate(const Expression& e, std::span<const R> pt) {
    if (!e.root) throw EvalError("empty expression");
    return detail::eval_node<R>(*e.root, pt);
}

template <class R>
R evaluate(const Expression& e, const std::vector<R>& pt) {
    return evaluate<R>(e, std::span<const R>(pt));
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string print_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    double back = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back != v) std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Precedence: Add/Sub/Neg = 1, Mul/Div = 2, Pow = 3, atoms = 4.
inline int prec(ExprNode::Op op) {
    switch (op) {
        case ExprNode::Op::Add:
        case ExprNode::Op::Sub:
        case ExprNode::Op::Neg: return 1;
        case ExprNode::Op::Mul:
        case ExprNode::Op::Div: return 2;
        case ExprNode::Op::Pow: return 3;
        default: return 4;
    }
}

inline void print_node(const ExprNode& n, int p, int q, int ctx, bool rhs, std::string& out) {
    const int mine = prec(n.op);
    const bool parens = mine < ctx || (mine == ctx && rhs);
    if (parens) out += '(';
    switch (n.op) {
        case ExprNode::Op::Const: out += print_double(n.value); break;
        case ExprNode::Op::Var:
            out += n.var < p ? "x" + std::to_string(n.var + 1)
                             : "y" + std::to_string(n.var - p + 1);
            break;
        case ExprNode::Op::Add:
            print_node(*n.a, p, q, 1, false, out);
            out += " + ";
            print_node(*n.b, p, q, 1, true, out);
            break;
        case ExprNode::Op::Sub:
            print_node(*n.a, p, q, 1, false, out);
            out += " - ";
            print_node(*n.b, p, q, 2, false, out);  // force parens on +/- to the right
            break;
        case ExprNode::Op::Mul:
            print_node(*n.a, p, q, 2, false, out);
            out += "*";
            print_node(*n.b, p, q, 2, true, out);
            break;
        case ExprNode::Op::Div:
            print_node(*n.a, p, q, 2, false, out);
            out += "/";
            print_node(*n.b, p, q, 3, false, out);  // force parens on * and / to the right
            break;
        case ExprNode::Op::Neg:
            out += '-';
            print_node(*n.a, p, q, 2, false, out);
            break;
        case ExprNode::Op::Pow:
            print_node(*n.a, p, q, 4, false, out);
            out += "^" + std::to_string(n.ipow);
            break;
        case ExprNode::Op::Sin:
        case ExprNode::Op::Cos:
        case ExprNode::Op::Exp:
            out += n.op == ExprNode::Op::Sin ? "sin(" : n.op == ExprNode::Op::Cos ? "cos(" : "exp(";
            print_node(*n.a, p, q, 0, false, out);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

}  // namespace detail

inline std::string pretty(const Expression& e) {
    std::string out;
    if (e.root) detail::print_node(*e.root, e.p, e.q, 0, false, out);
    return out;
}

}  // namespace folq
