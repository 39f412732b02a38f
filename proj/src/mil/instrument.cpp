#include "cfl/mil/instrument.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace cfl::mil {

const char* site_kind_name(SiteKind k) {
    switch (k) {
        case SiteKind::Assignment: return "assignment";
        case SiteKind::Predicate: return "predicate";
        case SiteKind::Param: return "param";
        case SiteKind::Phi: return "phi";
    }
    return "assignment";
}

namespace {

const std::string kUnknown = "unknown";

std::string join_hint(const std::string& a, const std::string& b) {
    return a == b ? a : kUnknown;
}

// Base names assigned anywhere inside `body` (syntactic; P-variables of
// nested lowered conditions are not Assign statements and stay out).
void collect_assigned(const std::vector<StmtPtr>& body, std::set<std::string>& out) {
    for (const auto& s : body) {
        if (s->kind == Stmt::Kind::Assign) out.insert(s->target);
        collect_assigned(s->body, out);
        collect_assigned(s->else_body, out);
    }
}

class Versioner {
  public:
    explicit Versioner(SiteTable& table) : table_(table) {}

    void run(Ast& ast) {
        for (auto& fn : ast.functions) {
            function_ = fn.name;
            cur_.clear();
            versions_.clear();
            block_ = next_block_++;
            fn.param_site_ids.clear();
            for (const auto& p : fn.params) {
                int id = make_site(p.name, SiteKind::Param, p.span.line, {}, type_text(p.type));
                fn.param_site_ids.push_back(id);
            }
            walk_body(fn.body);
        }
    }

  private:
    SiteTable& table_;
    std::string function_;
    std::map<std::string, int> cur_;       // base name -> current version's site id
    std::map<std::string, int> versions_;  // base name -> last used version
    int next_block_ = 0;
    int block_ = 0;

    int make_site(const std::string& base, SiteKind kind, int line, std::vector<int> parents,
                  std::string hint, int gate = -1) {
        std::sort(parents.begin(), parents.end());
        parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
        Site site;
        site.id = static_cast<int>(table_.sites.size());
        site.function = function_;
        site.base = base;
        site.version = ++versions_[base];
        site.line = line;
        site.block = block_;
        site.kind = kind;
        site.parents = std::move(parents);
        site.gate_site = gate;
        site.type_hint = std::move(hint);
        cur_[base] = site.id;
        table_.sites.push_back(std::move(site));
        return table_.sites.back().id;
    }

    // The parent contribution of reading `name`: its current version's site,
    // plus the gating predicate when that version is a merge.
    void add_use(const std::string& name, std::vector<int>& parents) const {
        auto it = cur_.find(name);
        if (it == cur_.end())
            throw std::logic_error("versioning read '" + name + "' before any assignment");
        parents.push_back(it->second);
        const Site& s = table_.at(it->second);
        if (s.kind == SiteKind::Phi && s.gate_site >= 0) parents.push_back(s.gate_site);
    }

    void collect_uses(const Expr& e, std::vector<int>& parents) const {
        if (e.kind == Expr::Kind::Var) {
            add_use(e.name, parents);
            return;
        }
        for (const auto& c : e.children) collect_uses(*c, parents);
    }

    std::string infer(const Expr& e) const {
        switch (e.kind) {
            case Expr::Kind::IntLit: return "int";
            case Expr::Kind::FloatLit: return "float";
            case Expr::Kind::BoolLit: return "bool";
            case Expr::Kind::StrLit: return "str";
            case Expr::Kind::Var: {
                auto it = cur_.find(e.name);
                return it == cur_.end() ? kUnknown : table_.at(it->second).type_hint;
            }
            case Expr::Kind::Cast:
                return e.cast == CastKind::Int ? "int" : e.cast == CastKind::Float ? "float" : "str";
            case Expr::Kind::Call: return kUnknown;
            case Expr::Kind::Unary:
                return e.un_op == UnOp::Not ? "bool" : infer(*e.children[0]);
            case Expr::Kind::Binary:
                switch (e.bin_op) {
                    case BinOp::Eq: case BinOp::Ne: case BinOp::Lt: case BinOp::Le:
                    case BinOp::Gt: case BinOp::Ge: case BinOp::And: case BinOp::Or:
                        return "bool";
                    default: {
                        std::string l = infer(*e.children[0]);
                        std::string r = infer(*e.children[1]);
                        if (e.bin_op == BinOp::Add && l == "str" && r == "str") return "str";
                        if (l == "int" && r == "int") return "int";
                        bool lnum = l == "int" || l == "float";
                        bool rnum = r == "int" || r == "float";
                        if (lnum && rnum) return "float";
                        return kUnknown;
                    }
                }
        }
        return kUnknown;
    }

    void walk_body(std::vector<StmtPtr>& body) {
        for (auto& s : body) walk_stmt(*s);
    }

    void walk_stmt(Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::Assign: {
                std::vector<int> parents;
                collect_uses(*s.value, parents);
                s.site_id = make_site(s.target, SiteKind::Assignment, s.span.line,
                                      std::move(parents), infer(*s.value));
                return;
            }
            case Stmt::Kind::Print:
            case Stmt::Kind::Assert:
            case Stmt::Kind::ExprStmt:
            case Stmt::Kind::Return:
                return;
            case Stmt::Kind::If: {
                int gate = lower_sites(s);
                auto snapshot = cur_;
                block_ = next_block_++;
                walk_body(s.body);
                auto after_then = cur_;
                cur_ = snapshot;
                if (!s.else_body.empty()) {
                    block_ = next_block_++;
                    walk_body(s.else_body);
                }
                auto after_else = cur_;
                block_ = next_block_++;  // merge block
                cur_ = snapshot;
                std::set<std::string> changed;
                for (const auto& [name, id] : after_then) {
                    auto pre = snapshot.find(name);
                    if (pre == snapshot.end() || pre->second != id) changed.insert(name);
                }
                for (const auto& [name, id] : after_else) {
                    auto pre = snapshot.find(name);
                    if (pre == snapshot.end() || pre->second != id) changed.insert(name);
                }
                for (const auto& name : changed) {
                    std::vector<int> parents;
                    std::string hint;
                    bool hint_set = false;
                    auto feed = [&](const std::map<std::string, int>& env) {
                        auto it = env.find(name);
                        if (it == env.end()) return;
                        parents.push_back(it->second);
                        const std::string& h = table_.at(it->second).type_hint;
                        hint = hint_set ? join_hint(hint, h) : h;
                        hint_set = true;
                    };
                    feed(after_then);
                    feed(after_else);
                    parents.push_back(gate);
                    int id = make_site(name, SiteKind::Phi, s.span.line, std::move(parents),
                                       hint_set ? hint : kUnknown, gate);
                    s.merge_phis.push_back({id, name});
                }
                return;
            }
            case Stmt::Kind::While: {
                std::set<std::string> assigned;
                collect_assigned(s.body, assigned);
                std::vector<std::string> carried;
                for (const auto& name : assigned)
                    if (cur_.count(name)) carried.push_back(name);

                block_ = next_block_++;  // loop header
                std::vector<int> entry_ids;
                for (const auto& name : carried) {
                    int pre = cur_.at(name);
                    int id = make_site(name, SiteKind::Phi, s.span.line, {pre},
                                       table_.at(pre).type_hint);
                    s.entry_phis.push_back({id, name});
                    entry_ids.push_back(id);
                }
                int gate = lower_sites(s);
                for (size_t i = 0; i < carried.size(); ++i) {
                    Site& phi = table_.sites[static_cast<size_t>(entry_ids[i])];
                    phi.gate_site = gate;
                    phi.parents.push_back(gate);
                }
                block_ = next_block_++;  // body
                walk_body(s.body);
                for (size_t i = 0; i < carried.size(); ++i) {
                    int back = cur_.at(carried[i]);
                    if (back != entry_ids[i]) {
                        Site& phi = table_.sites[static_cast<size_t>(entry_ids[i])];
                        phi.parents.push_back(back);
                        phi.type_hint = join_hint(phi.type_hint, table_.at(back).type_hint);
                    }
                }
                for (auto& phi_id : entry_ids) {
                    Site& phi = table_.sites[static_cast<size_t>(phi_id)];
                    std::sort(phi.parents.begin(), phi.parents.end());
                    phi.parents.erase(std::unique(phi.parents.begin(), phi.parents.end()),
                                      phi.parents.end());
                }
                block_ = next_block_++;  // exit
                for (size_t i = 0; i < carried.size(); ++i) {
                    int id = make_site(carried[i], SiteKind::Phi, s.span.line,
                                       {entry_ids[i], gate},
                                       table_.at(entry_ids[i]).type_hint, gate);
                    s.exit_phis.push_back({id, carried[i]});
                }
                return;
            }
        }
    }

    // Creates the P-variable sites of a lowered condition; returns the
    // combined P<k>_0 site id (the gate for dependent merges).
    int lower_sites(Stmt& s) {
        if (!s.lowered)
            throw std::logic_error("instrument requires a predicate-transformed program");
        LoweredCond& lc = *s.lowered;
        if (lc.comb == LoweredCond::Comb::Single) {
            std::vector<int> parents;
            collect_uses(*lc.atoms[0].expr, parents);
            int id = make_site(lc.combined_var, SiteKind::Predicate, s.span.line,
                               std::move(parents), "bool");
            lc.atoms[0].site_id = id;
            lc.combined_site_id = id;
            return id;
        }
        std::vector<int> atom_ids;
        for (auto& atom : lc.atoms) {
            std::vector<int> parents;
            collect_uses(*atom.expr, parents);
            atom.site_id =
                make_site(atom.var, SiteKind::Predicate, atom.expr->span.line, std::move(parents), "bool");
            atom_ids.push_back(atom.site_id);
        }
        lc.combined_site_id =
            make_site(lc.combined_var, SiteKind::Predicate, s.span.line, std::move(atom_ids), "bool");
        return lc.combined_site_id;
    }
};

}  // namespace

SiteTable instrument(Ast& ast) {
    SiteTable table;
    Versioner(table).run(ast);
    return table;
}

InstrumentedProgram instrument_program(const Ast& source_ast) {
    InstrumentedProgram out;
    out.ast = source_ast.clone();
    out.predicates = transform_predicates(out.ast);
    out.sites = instrument(out.ast);
    return out;
}

namespace {

void collect_conditions(const std::vector<StmtPtr>& body, std::vector<ConditionSite>& out) {
    for (const auto& s : body) {
        if (s->lowered)
            out.push_back({s->lowered->ordinal, s->lowered->combined_site_id, s->span.line});
        collect_conditions(s->body, out);
        collect_conditions(s->else_body, out);
    }
}

}  // namespace

std::vector<ConditionSite> collect_condition_sites(const Ast& ast) {
    std::vector<ConditionSite> out;
    for (const auto& fn : ast.functions) collect_conditions(fn.body, out);
    return out;
}

}  // namespace cfl::mil
