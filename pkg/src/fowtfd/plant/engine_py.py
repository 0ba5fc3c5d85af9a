"""Pure-Python scenario stepping loop.

This is the fallback engine and the arithmetic reference for the compiled
kernel: both implement the identical sequence of double-precision
operations, so their traces agree bit for bit (the kernel is compiled with
FP contraction disabled).  Keep every expression in sync with _engine.pyx.
"""

from __future__ import annotations

import math

from ._packing import PAR_INDEX

ENGINE_NAME = "python"

RAD2DEG = 57.29577951308232


def run_loop(par, x, z0, nsteps, wind, eta_x, eta_y, u_extra,
             fault_mag, fault_k0, fault_k1, u_out, y_out, x_out):
    """Advance the plant ``nsteps`` steps in place; returns the final
    controller integrator state.  Output arrays are written row by row.
    """
    g = lambda name: par[PAR_INDEX[name]]
    dt = g("dt")
    rho_air = g("rho_air"); rotor_area = g("rotor_area"); rotor_radius = g("rotor_radius")
    cp_c1 = g("cp_c1"); cp_c2 = g("cp_c2"); cp_c3 = g("cp_c3")
    cp_c4 = g("cp_c4"); cp_c5 = g("cp_c5"); cp_c6 = g("cp_c6")
    ct_lin = g("ct_lin"); ct_pitch = g("ct_pitch"); ct_min = g("ct_min"); ct_max = g("ct_max")
    blade_stiffness = g("blade_stiffness")
    blade_torque_loss = g("blade_torque_loss"); blade_thrust_loss = g("blade_thrust_loss")
    gear_ratio = g("gear_ratio"); rotor_inertia = g("rotor_inertia")
    gen_inertia = g("gen_inertia"); shaft_damping = g("shaft_damping")
    surge_mass = g("surge_mass"); surge_damping = g("surge_damping")
    moor_k_inner = g("moor_k_inner"); moor_k_outer = g("moor_k_outer")
    moor_knee = g("moor_knee"); moor_relax_time = g("moor_relax_time")
    pitch_inertia = g("pitch_inertia"); pitch_stiffness = g("pitch_stiffness")
    pitch_damping = g("pitch_damping"); thrust_arm = g("thrust_arm")
    tower_mass = g("tower_mass"); tower_stiffness = g("tower_stiffness")
    tower_damping = g("tower_damping"); hub_height = g("hub_height")
    act_omega = g("pitch_act_omega"); act_zeta = g("pitch_act_zeta")
    pitch_lo = g("pitch_min"); pitch_hi = g("pitch_max")
    torque_tau = g("torque_act_tau"); torque_lo = g("torque_min"); torque_hi = g("torque_max")
    kp = g("ctrl_pitch_kp"); ki = g("ctrl_pitch_ki"); int_lim = g("ctrl_int_limit")
    rated_gen = g("rated_gen_speed")
    rated_torque = g("rated_torque"); k_law = g("torque_law_gain")
    pitch_ff = g("pitch_feedforward"); torque_ff = g("torque_feedforward")
    open_loop = g("open_loop") > 0.5
    pitch_loop_on = g("pitch_loop_on") > 0.5
    power_gain = g("power_gain"); rated_power = g("rated_power"); bend_gain = g("bend_gain")
    bend_aux_gain = g("bend_aux_gain"); bend_aux_pitch_gain = g("bend_aux_pitch_gain")
    b_eq = g("tower_defl_eq")
    f10_km = g("fairlead_km_scale"); f10_shift = g("fairlead_neutral_shift")
    f10_tm = g("fairlead_tower_m_scale"); f10_td = g("fairlead_tower_d_scale")
    f11_per_len = g("anchor_shift_per_length")
    f11_tm = g("anchor_tower_m_scale"); f11_td = g("anchor_tower_d_scale")

    s = x[0]; ds = x[1]; phi = x[2]; dphi = x[3]; b = x[4]; db = x[5]
    wr = x[6]; wg = x[7]; th = x[8]; dth = x[9]; tg = x[10]; xm = x[11]
    z = z0

    have_extra = u_extra is not None
    store_states = x_out is not None

    for k in range(nsteps):
        a_f1 = fault_k0[0] <= k < fault_k1[0]
        a_f2 = fault_k0[1] <= k < fault_k1[1]
        a_f3 = fault_k0[2] <= k < fault_k1[2]
        a_f4 = fault_k0[3] <= k < fault_k1[3]
        a_f5 = fault_k0[4] <= k < fault_k1[4]
        a_f6 = fault_k0[5] <= k < fault_k1[5]
        a_f7 = fault_k0[6] <= k < fault_k1[6]
        a_f8 = fault_k0[7] <= k < fault_k1[7]
        a_f9 = fault_k0[8] <= k < fault_k1[8]
        a_f10 = fault_k0[9] <= k < fault_k1[9]
        a_f11 = fault_k0[10] <= k < fault_k1[10]

        # Clean outputs from the current state.
        y0 = th; y1 = th; y2 = th
        y3 = tg
        y4 = wr
        y5 = wg
        y6 = rated_power + power_gain * (wg - rated_gen) + rated_gen * (tg - rated_torque)
        y7 = bend_gain * b
        y8 = bend_aux_gain * b + bend_aux_pitch_gain * phi
        y9 = (tower_stiffness * (b_eq - b) - tower_damping * db) / tower_mass

        # Sensor faults act on the clean values; noise is added after.
        if a_f1:
            y5 = y5 * fault_mag[0]
        if a_f2:
            y6 = y6 * fault_mag[1]
        if a_f3:
            y7 = y7 + fault_mag[2]
        if a_f4:
            y4 = y4 * fault_mag[3]
        if a_f8:
            y3 = y3 * fault_mag[7]

        y0 += eta_y[k, 0]; y1 += eta_y[k, 1]; y2 += eta_y[k, 2]
        y3 += eta_y[k, 3]; y4 += eta_y[k, 4]; y5 += eta_y[k, 5]
        y6 += eta_y[k, 6]; y7 += eta_y[k, 7]; y8 += eta_y[k, 8]
        y9 += eta_y[k, 9]

        if a_f7:  # stuck pitch sensors read the stuck value, noise-free
            y0 = fault_mag[6]; y1 = fault_mag[6]; y2 = fault_mag[6]

        y_out[k, 0] = y0; y_out[k, 1] = y1; y_out[k, 2] = y2
        y_out[k, 3] = y3; y_out[k, 4] = y4; y_out[k, 5] = y5
        y_out[k, 6] = y6; y_out[k, 7] = y7; y_out[k, 8] = y8
        y_out[k, 9] = y9

        # Controller (feedback on the measured generator speed): PI pitch
        # riding its lower saturation below rated, quadratic torque law
        # capped at rated torque.  Open-loop mode holds the equilibrium
        # commands (identification experiments below rated).
        if open_loop:
            u1 = pitch_ff
            u2 = torque_ff
        else:
            if pitch_loop_on:
                werr = y5 - rated_gen
                z = z + dt * werr
                if z > int_lim:
                    z = int_lim
                elif z < -int_lim:
                    z = -int_lim
                u1 = pitch_ff + kp * werr + ki * z
            else:
                u1 = pitch_ff
            u2 = k_law * y5 * y5
            if u2 > rated_torque:
                u2 = rated_torque
        if have_extra:
            u1 = u1 + u_extra[k, 0]
            u2 = u2 + u_extra[k, 1]
        if u1 < pitch_lo:
            u1 = pitch_lo
        elif u1 > pitch_hi:
            u1 = pitch_hi
        if u2 < torque_lo:
            u2 = torque_lo
        elif u2 > torque_hi:
            u2 = torque_hi
        u_out[k, 0] = u1
        u_out[k, 1] = u2

        # Process faults.
        pitch_drive = fault_mag[4] if a_f5 else u1
        torque_target = u2 + fault_mag[5] if a_f6 else u2
        blade_scale = fault_mag[8] if a_f9 else 1.0
        km_scale = 1.0
        neutral = 0.0
        tower_m_scale = 1.0
        tower_d_scale = 1.0
        if a_f10:
            km_scale = km_scale * f10_km
            neutral = neutral + f10_shift
            tower_m_scale = tower_m_scale * f10_tm
            tower_d_scale = tower_d_scale * f10_td
        if a_f11:
            neutral = neutral + f11_per_len * fault_mag[10]
            tower_m_scale = tower_m_scale * f11_tm
            tower_d_scale = tower_d_scale * f11_td

        # Aerodynamics.
        v = wind[k] - ds - hub_height * dphi - db
        if v < 1.0:
            v = 1.0
        wre = wr if wr > 0.1 else 0.1
        lam = wre * rotor_radius / v
        pitch_deg = th * RAD2DEG
        if pitch_deg < 0.0:
            pitch_deg = 0.0
        li = 1.0 / (lam + 0.08 * pitch_deg) - 0.035 / (pitch_deg * pitch_deg * pitch_deg + 1.0)
        if li <= 1e-6:
            cp = 0.0
        else:
            lam_i = 1.0 / li
            cp = cp_c1 * (cp_c2 / lam_i - cp_c3 * pitch_deg - cp_c4) * math.exp(-cp_c5 / lam_i) \
                + cp_c6 * lam
            if cp < 0.0:
                cp = 0.0
            elif cp > 0.593:
                cp = 0.593
        ct = ct_lin * lam * math.exp(-ct_pitch * pitch_deg)
        if ct < ct_min:
            ct = ct_min
        elif ct > ct_max:
            ct = ct_max
        q = 0.5 * rho_air * rotor_area * v * v
        thrust0 = q * ct
        torque0 = q * v * cp / wre
        defl = thrust0 / (3.0 * blade_stiffness * blade_scale)
        rel = defl / rotor_radius
        q_torque = 1.0 - blade_torque_loss * rel
        q_thrust = 1.0 - blade_thrust_loss * rel
        if q_torque < 0.0:
            q_torque = 0.0
        if q_thrust < 0.0:
            q_thrust = 0.0
        torque_a = torque0 * q_torque
        thrust = thrust0 * q_thrust

        # Mooring restoring force.
        dm = s - xm
        f_m = moor_k_inner * dm
        if dm > moor_knee:
            f_m += moor_k_outer * (dm - moor_knee)
        elif dm < -moor_knee:
            f_m += moor_k_outer * (dm + moor_knee)
        f_m = -f_m * km_scale

        slip = wr - wg / gear_ratio
        t_shaft = shaft_damping * slip

        acc_s = (thrust + f_m - surge_damping * ds) / surge_mass
        acc_phi = (thrust * thrust_arm - pitch_stiffness * phi - pitch_damping * dphi) \
            / pitch_inertia
        acc_b = (thrust - tower_stiffness * b - tower_damping * tower_d_scale * db) \
            / (tower_mass * tower_m_scale)
        dwr = (torque_a - t_shaft) / rotor_inertia
        dwg = (t_shaft / gear_ratio - tg) / gen_inertia
        acc_th = act_omega * act_omega * (pitch_drive - th) - 2.0 * act_zeta * act_omega * dth
        dtg = (torque_target - tg) / torque_tau
        dxm = (neutral - xm) / moor_relax_time

        s = s + dt * ds
        ds = ds + dt * acc_s + eta_x[k, 1]
        phi = phi + dt * dphi
        dphi = dphi + dt * acc_phi + eta_x[k, 3]
        b = b + dt * db
        db = db + dt * acc_b + eta_x[k, 5]
        wr = wr + dt * dwr + eta_x[k, 6]
        wg = wg + dt * dwg + eta_x[k, 7]
        th = th + dt * dth
        dth = dth + dt * acc_th + eta_x[k, 9]
        tg = tg + dt * dtg + eta_x[k, 10]
        xm = xm + dt * dxm

        if store_states:
            x_out[k, 0] = s; x_out[k, 1] = ds; x_out[k, 2] = phi
            x_out[k, 3] = dphi; x_out[k, 4] = b; x_out[k, 5] = db
            x_out[k, 6] = wr; x_out[k, 7] = wg; x_out[k, 8] = th
            x_out[k, 9] = dth; x_out[k, 10] = tg; x_out[k, 11] = xm

    x[0] = s; x[1] = ds; x[2] = phi; x[3] = dphi; x[4] = b; x[5] = db
    x[6] = wr; x[7] = wg; x[8] = th; x[9] = dth; x[10] = tg; x[11] = xm
    return z
