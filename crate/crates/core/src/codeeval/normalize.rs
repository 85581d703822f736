use super::code::NetworkCode;
use super::eval::{ArgPlan, CodedInstance};
use super::function::{tabulate, LocalFunction};
use crate::error::{Error, Result};
use crate::netmodel::{EdgeId, NecInstance};

/// True if `f`, as a function of one `width`-bit argument, is the identity.
pub fn is_identity(f: &LocalFunction, width: u32) -> Result<bool> {
    if *f == LocalFunction::Relay(0) {
        return Ok(true);
    }
    if width > 24 {
        return Err(Error::limit("max table entries", 1u128 << width, 1 << 24));
    }
    for v in 0..1u64 << width {
        if f.eval(&[v], &[width])? != v {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rewrites the code so that every `z` in `pairs` relays its branch input `a`
/// unchanged, moving `z`'s former processing into every function at `z`'s
/// head node that reads `z`.
///
/// `z` must read `a` as its only argument. Error-free behaviour is preserved
/// exactly. Under an error on `z` the head now sees `f(a ^ r)` where it used to
/// see `f(a) ^ r`; those agree for xor-affine `f`, and in general the set of
/// outcomes reachable by jamming `z` can only shrink.
pub fn normalize_relay(
    inst: &NecInstance,
    code: &NetworkCode,
    pairs: &[(EdgeId, EdgeId)],
    max_entries: u64,
) -> Result<NetworkCode> {
    let net = inst.network();
    let layout = inst.layout();
    let n = code.block_length;
    let bits = code.message_bits;
    let mut out = code.clone();

    for &(a, z) in pairs {
        let z_name = net.edge_name(z).to_string();
        let zp = ArgPlan::at(net, &layout, net.edge(z).tail, n, bits);
        if zp.edges != [a] || !zp.slots.is_empty() {
            return Err(Error::Precondition(format!(
                "edge `{z_name}` must read `{}` as its only input",
                net.edge_name(a)
            )));
        }
        let width = n * net.capacity(z);
        if n * net.capacity(a) != width {
            return Err(Error::Precondition(format!(
                "displaced processing of `{z_name}` would change its width"
            )));
        }
        let f = out.encoder(&z_name)?.clone();
        if is_identity(&f, width)? {
            continue;
        }

        let head = net.edge(z).head;
        let consumers: Vec<EdgeId> = net.out_edges(head).to_vec();
        for c in consumers {
            let plan = ArgPlan::at(net, &layout, head, n, bits);
            let pos = plan.position(z).expect("z is an in-edge of its head");
            let name = net.edge_name(c).to_string();
            let old = out.encoder(&name)?.clone();
            let table = displace(&old, &f, &plan, pos, width, max_entries)?;
            out.encoders.insert(name, LocalFunction::Table(table));
        }
        if head == inst.terminal {
            let name = net.node_name(head).to_string();
            if let Some(old) = out.decoders.get(&name).cloned() {
                let plan = ArgPlan::at(net, &layout, head, n, bits);
                let pos = plan.position(z).expect("z is an in-edge of its head");
                let table = displace(&old, &f, &plan, pos, width, max_entries)?;
                out.decoders.insert(name, LocalFunction::Table(table));
            }
        }
        out.encoders.insert(z_name, LocalFunction::Relay(0));
    }
    Ok(out)
}

fn displace(
    consumer: &LocalFunction,
    f: &LocalFunction,
    plan: &ArgPlan,
    pos: usize,
    width: u32,
    max_entries: u64,
) -> Result<Vec<u64>> {
    tabulate(&plan.widths, max_entries, |args| {
        let mut args = args.to_vec();
        args[pos] = f.eval(&[args[pos]], &[width])?;
        consumer.eval(&args, &plan.widths)
    })
}
