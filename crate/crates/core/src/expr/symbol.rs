use std::fmt;
use std::sync::Arc;

/// Functions of (x, y, p) whose partial derivatives are tracked as jet symbols.
///
/// `F` is the right-hand side of the ODE. The other three are the unknown
/// coefficient functions of the normalization ansatz for the connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetFn {
    F,
    Mu,
    Delta,
    Nu,
}

impl JetFn {
    pub fn name(self) -> &'static str {
        match self {
            JetFn::F => "f",
            JetFn::Mu => "mu",
            JetFn::Delta => "delta",
            JetFn::Nu => "nu",
        }
    }
}

/// A variable of the symbol universe.
///
/// The derived order is the global symbol order: kind first (base
/// coordinates, bundle parameters, group parameters, jets, free constants),
/// then indices, then name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    X,
    Y,
    /// y'
    P,
    U1,
    U2,
    U3,
    T1,
    V1,
    V3,
    /// ∂x^i ∂y^j ∂p^k of a jet function.
    Jet(JetFn, u16, u16, u16),
    Free(Arc<str>),
}

impl Symbol {
    pub fn fjet(i: u16, j: u16, k: u16) -> Symbol {
        Symbol::Jet(JetFn::F, i, j, k)
    }

    pub fn free(name: &str) -> Symbol {
        Symbol::Free(Arc::from(name))
    }

    pub fn is_base_coord(&self) -> bool {
        matches!(self, Symbol::X | Symbol::Y | Symbol::P)
    }

    pub fn is_bundle_param(&self) -> bool {
        matches!(self, Symbol::U1 | Symbol::U2 | Symbol::U3 | Symbol::T1)
    }

    pub fn is_group_param(&self) -> bool {
        matches!(self, Symbol::V1 | Symbol::V3)
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Symbol::Jet(..))
    }

    pub fn is_fjet(&self) -> bool {
        matches!(self, Symbol::Jet(JetFn::F, ..))
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Symbol::Free(_))
    }

    /// The symbol obtained by differentiating a jet with respect to a base
    /// coordinate, if `self` depends on it.
    pub(crate) fn jet_bump(&self, wrt: &Symbol) -> Option<Symbol> {
        match (self, wrt) {
            (Symbol::Jet(g, i, j, k), Symbol::X) => Some(Symbol::Jet(*g, i + 1, *j, *k)),
            (Symbol::Jet(g, i, j, k), Symbol::Y) => Some(Symbol::Jet(*g, *i, j + 1, *k)),
            (Symbol::Jet(g, i, j, k), Symbol::P) => Some(Symbol::Jet(*g, *i, *j, k + 1)),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::X => write!(f, "x"),
            Symbol::Y => write!(f, "y"),
            Symbol::P => write!(f, "y'"),
            Symbol::U1 => write!(f, "u1"),
            Symbol::U2 => write!(f, "u2"),
            Symbol::U3 => write!(f, "u3"),
            Symbol::T1 => write!(f, "t1"),
            Symbol::V1 => write!(f, "v1"),
            Symbol::V3 => write!(f, "v3"),
            Symbol::Jet(g, i, j, k) => {
                write!(f, "{}", g.name())?;
                if i + j + k > 0 {
                    write!(f, "_")?;
                    for _ in 0..*i {
                        write!(f, "x")?;
                    }
                    for _ in 0..*j {
                        write!(f, "y")?;
                    }
                    for _ in 0..*k {
                        write!(f, "y'")?;
                    }
                }
                Ok(())
            }
            Symbol::Free(name) => write!(f, "{name}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kind_then_indices_then_name() {
        let mut syms = vec![
            Symbol::free("b"),
            Symbol::fjet(0, 1, 0),
            Symbol::V3,
            Symbol::free("a"),
            Symbol::fjet(0, 0, 2),
            Symbol::U1,
            Symbol::P,
            Symbol::X,
        ];
        syms.sort();
        assert_eq!(
            syms,
            vec![
                Symbol::X,
                Symbol::P,
                Symbol::U1,
                Symbol::V3,
                Symbol::fjet(0, 0, 2),
                Symbol::fjet(0, 1, 0),
                Symbol::free("a"),
                Symbol::free("b"),
            ]
        );
    }

    #[test]
    fn jet_display() {
        assert_eq!(Symbol::fjet(0, 0, 0).to_string(), "f");
        assert_eq!(Symbol::fjet(1, 1, 2).to_string(), "f_xyy'y'");
        assert_eq!(Symbol::Jet(JetFn::Mu, 0, 0, 1).to_string(), "mu_y'");
    }
}
