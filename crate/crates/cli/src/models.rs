use hypstruct::actions::ActionModel;

use crate::config::parse_real;
use crate::error::{CliError, CliResult};

/// `bs-h2`, `bs-tree`, `wreath-tree:n`, `phi-xi:x` or `cayley`. Cayley
/// models take generators as `1,0;0,1`; with `order` they live in a cyclic
/// group and each generator is a single integer.
pub fn parse_model(name: &str, generators: Option<&str>, order: Option<u64>) -> CliResult<ActionModel> {
    let name = name.trim();
    let model = match name.split_once(':') {
        None if name == "bs-h2" => ActionModel::BsHalfPlane,
        None if name == "bs-tree" => ActionModel::BsTree,
        None if name == "cayley" => {
            let text = generators.ok_or_else(|| CliError::validation("cayley models need --generators"))?;
            let gens: Vec<Vec<i64>> = text
                .split(';')
                .map(|g| g.split(',').map(|c| c.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::validation(format!("bad generator list {text:?}")))?;
            match order {
                Some(n) => {
                    if gens.iter().any(|g| g.len() != 1) {
                        return Err(CliError::validation("cyclic generators are single integers"));
                    }
                    ActionModel::cayley_cyclic(n, gens.into_iter().map(|g| g[0]).collect())?
                }
                None => ActionModel::cayley_lattice(gens)?,
            }
        }
        Some(("wreath-tree", n)) => {
            let n = n.parse().map_err(|_| CliError::validation(format!("bad tree modulus {n:?}")))?;
            ActionModel::wreath_tree(n)?
        }
        Some(("phi-xi", x)) => ActionModel::PhiXi {
            xi: parse_real(x).ok_or_else(|| CliError::validation(format!("bad ξ {x:?}")))?,
        },
        _ => {
            return Err(CliError::validation(format!(
                "unknown model {name:?}; expected bs-h2, bs-tree, wreath-tree:n, phi-xi:x or cayley"
            )))
        }
    };
    if let ActionModel::PhiXi { xi } = model {
        if !(xi > 0.0) || xi == 1.0 {
            return Err(CliError::validation("ξ must be positive and different from 1"));
        }
    }
    Ok(model)
}
